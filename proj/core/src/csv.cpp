#include "eann/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace eann {

namespace {

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(trim(std::string_view(line).substr(start)));
            break;
        }
        cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

bool try_parse(std::string_view token, double& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end && !token.empty();
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

double parse_double(std::string_view token, const std::string& what) {
    double v;
    if (!try_parse(token, v))
        throw std::invalid_argument(what + ": cannot parse '" + std::string(token) + "' as a number");
    if (!std::isfinite(v))
        throw std::invalid_argument(what + ": non-finite value '" + std::string(token) + "'");
    return v;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("read_csv: cannot open " + path.string());

    CsvTable table;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t cols = 0;
    bool saw_data = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_row(line);

        if (!saw_data) {
            double probe;
            if (!try_parse(cells[0], probe)) {
                if (!table.header.empty())
                    throw std::invalid_argument("read_csv: " + path.string() + " line "
                                                + std::to_string(line_no)
                                                + ": second non-numeric row (only one header line is allowed)");
                table.header = cells;
                cols = cells.size();
                continue;
            }
        }

        if (cols == 0) cols = cells.size();
        if (cells.size() != cols)
            throw std::invalid_argument("read_csv: " + path.string() + " line "
                                        + std::to_string(line_no) + ": expected "
                                        + std::to_string(cols) + " columns, got "
                                        + std::to_string(cells.size()));
        std::vector<double> row(cols);
        for (std::size_t c = 0; c < cols; ++c)
            row[c] = parse_double(cells[c],
                                  "read_csv: " + path.string() + " line " + std::to_string(line_no)
                                      + " column " + std::to_string(c + 1));
        rows.push_back(std::move(row));
        saw_data = true;
    }

    table.values = Matrix(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols; ++c) table.values(r, c) = rows[r][c];
    return table;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Matrix& values) {
    if (!header.empty() && header.size() != values.cols())
        throw std::invalid_argument("write_csv: header size does not match column count");
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("write_csv: cannot open " + path.string() + " for writing");

    if (!header.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c)
            out << (c ? "," : "") << header[c];
        out << '\n';
    }
    for (std::size_t r = 0; r < values.rows(); ++r) {
        for (std::size_t c = 0; c < values.cols(); ++c)
            out << (c ? "," : "") << format_double(values(r, c));
        out << '\n';
    }
    if (!out) throw std::runtime_error("write_csv: write to " + path.string() + " failed");
}

}  // namespace eann
