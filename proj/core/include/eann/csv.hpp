#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "eann/matrix.hpp"

namespace eann {

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// Strict full-token parse; throws std::invalid_argument naming `what` on
// failure or on non-finite values.
double parse_double(std::string_view token, const std::string& what);

struct CsvTable {
    std::vector<std::string> header;  // empty when the file has no header line
    Matrix values;
};

// Headerless or single-header numeric CSV, '.' decimal point. Rejects ragged
// rows, non-numeric cells, and NaN/infinite entries, naming the line.
CsvTable read_csv(const std::filesystem::path& path);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Matrix& values);

}  // namespace eann
