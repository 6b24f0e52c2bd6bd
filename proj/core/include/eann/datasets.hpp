#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eann/matrix.hpp"
#include "eann/network.hpp"

namespace eann {

struct ColumnRange {
    double min = 0.0;
    double max = 0.0;
    bool operator==(const ColumnRange&) const = default;
};

// Per-column linear maps to [0, 1], fitted on the training portion only.
struct Normalization {
    std::vector<ColumnRange> inputs;
    ColumnRange target;
    bool operator==(const Normalization&) const = default;
};

struct SupervisedDataset {
    std::string name;
    Matrix inputs;  // P x d
    std::vector<double> targets;
    std::size_t split_index = 0;  // first split_index patterns are the training split
    std::optional<Normalization> normalization;

    std::size_t pattern_count() const { return targets.size(); }
    bool operator==(const SupervisedDataset&) const = default;
};

struct RawSeries {
    std::vector<double> values;
    double sample_interval = 1.0;
};

// Integrates dx/dt = 0.2 x(t-tau) / (1 + x(t-tau)^10) - 0.1 x(t) with
// classic RK4 on a fine grid of step dt, reading the delayed term from the
// stored trajectory (half-step lags use a cubic Hermite read between
// adjacent grid points; times before 0 read `history`). Returns n_samples
// values at unit
// time spacing starting at t = 0. Requires tau/dt and 1/dt integral.
RawSeries mackey_glass_generate(std::size_t n_samples, double dt = 0.1, double tau = 17.0,
                                double x0 = 1.2, double history = 0.0);

// 1000 patterns [x(t-18), x(t-12), x(t-6), x(t)] -> x(t+6) for t = 18..1017,
// so the series must hold at least 1024 unit samples. Train split 500.
SupervisedDataset embed_mackey(const RawSeries& series);

// Two-column CSV (gas feed rate, CO2 concentration); patterns
// [u(t), y(t)] -> y(t+1), first 292 kept, train split 146.
SupervisedDataset load_gas_furnace(const std::filesystem::path& path);

// Trailing mean over `window` samples; the first window-1 entries average
// the shorter available prefix.
std::vector<double> moving_average(std::span<const double> series, std::size_t window);

// Single-column hourly flow CSV with at least 476 values; patterns
// [f(t), f(t-1), ma12(t), ma24(t)] -> f(t+1) for t = 1.., at most 475 kept,
// train split 240.
SupervisedDataset load_wastewater(const std::filesystem::path& path);

// Deterministic stand-in flow series (daily and weekly cycles plus noise)
// for exercising the wastewater pipeline when the recorded plant data is
// not available.
RawSeries synthetic_wastewater_series(std::size_t n_values, std::uint64_t seed);

// Maps every input column and the target into [0, 1] using training-portion
// min/max; rejects columns constant on the training portion.
SupervisedDataset normalize(const SupervisedDataset& dataset);

double normalize_target(const Normalization& norm, double raw);
double denormalize_target(const Normalization& norm, double normalized);

EvaluationBatch train_batch(const SupervisedDataset& dataset);
EvaluationBatch test_batch(const SupervisedDataset& dataset);

// Splits the training patterns into (head, tail) with the tail holding
// roughly the last 20%, at least one pattern each. The tail can serve as a
// fitness signal that leaves the test split untouched.
std::pair<EvaluationBatch, EvaluationBatch> carve_holdout(const SupervisedDataset& dataset);

// CSV of d input columns plus one target column, with a JSON sidecar at
// "<csv path>.json" recording name, split, and normalization.
void save_dataset(const SupervisedDataset& dataset, const std::filesystem::path& csv_path);
SupervisedDataset load_dataset(const std::filesystem::path& csv_path);

}  // namespace eann
