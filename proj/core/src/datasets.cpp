#include "eann/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

#include "eann/csv.hpp"
#include "eann/rng.hpp"

namespace eann {

namespace {

constexpr std::size_t kMackeyPatterns = 1000;
constexpr std::size_t kMackeyLags[4] = {18, 12, 6, 0};
constexpr std::size_t kMackeyHorizon = 6;
constexpr std::size_t kMackeyFirstT = 18;
constexpr std::size_t kMackeySplit = 500;

constexpr std::size_t kFurnacePatterns = 292;
constexpr std::size_t kFurnaceSplit = 146;

constexpr std::size_t kWastePatterns = 475;
constexpr std::size_t kWasteSplit = 240;
constexpr std::size_t kWasteShortMa = 12;
constexpr std::size_t kWasteLongMa = 24;

long integral_ratio(double num, double den, const std::string& what) {
    const double ratio = num / den;
    const long r = std::lround(ratio);
    if (r < 1 || std::abs(ratio - static_cast<double>(r)) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument(what + " must be a positive integer, got "
                                    + format_double(ratio));
    return r;
}

void check_split(const SupervisedDataset& ds, const std::string& what) {
    const std::size_t p = ds.pattern_count();
    if (ds.inputs.rows() != p)
        throw std::invalid_argument(what + ": input row count does not match target count");
    if (p < 2 || ds.split_index < 1 || ds.split_index >= p)
        throw std::invalid_argument(what + ": split index " + std::to_string(ds.split_index)
                                    + " not in [1, " + std::to_string(p) + " - 1]");
}

EvaluationBatch slice_batch(const SupervisedDataset& ds, std::size_t begin, std::size_t end) {
    EvaluationBatch batch;
    batch.inputs = Matrix(end - begin, ds.inputs.cols());
    batch.targets.resize(end - begin);
    for (std::size_t p = begin; p < end; ++p) {
        for (std::size_t c = 0; c < ds.inputs.cols(); ++c)
            batch.inputs(p - begin, c) = ds.inputs(p, c);
        batch.targets[p - begin] = ds.targets[p];
    }
    return batch;
}

}  // namespace

RawSeries mackey_glass_generate(std::size_t n_samples, double dt, double tau, double x0,
                                double history) {
    if (n_samples == 0) throw std::invalid_argument("mackey_glass_generate: n_samples must be >= 1");
    if (!(dt > 0.0) || !(tau > 0.0))
        throw std::invalid_argument("mackey_glass_generate: dt and tau must be positive");
    if (!std::isfinite(x0) || !std::isfinite(history))
        throw std::invalid_argument("mackey_glass_generate: non-finite initial state");
    const long lag = integral_ratio(tau, dt, "mackey_glass_generate: tau/dt");
    const long per_unit = integral_ratio(1.0, dt, "mackey_glass_generate: 1/dt");

    const std::size_t steps = (n_samples - 1) * static_cast<std::size_t>(per_unit);
    std::vector<double> x(steps + 1);
    x[0] = x0;

    // Stored right-hand-side slopes back up cubic interpolation of the
    // delayed term; constant history has slope zero.
    std::vector<double> slope(steps + 1, 0.0);
    auto at = [&](long idx) { return idx < 0 ? history : x[static_cast<std::size_t>(idx)]; };
    auto df = [&](long idx) { return idx < 0 ? 0.0 : slope[static_cast<std::size_t>(idx)]; };
    auto f = [](double xv, double xd) {
        return 0.2 * xd / (1.0 + std::pow(xd, 10)) - 0.1 * xv;
    };

    for (std::size_t k = 0; k < steps; ++k) {
        const long ks = static_cast<long>(k);
        const long j0 = ks - lag;
        const long j1 = j0 + 1;
        slope[k] = f(x[k], at(j0));
        const double d0 = at(j0);
        // The history need not join the trajectory continuously, so the
        // delayed channel can jump at time zero. A window that ends exactly
        // there takes the left limit (the integral never sees the single
        // right-limit point), and a window straddling it stays on the
        // history side; interpolating across the jump would cost an order.
        const double d1 = j1 <= 0 ? history : x[static_cast<std::size_t>(j1)];
        // Half-step lags fall between grid points; a linear read there
        // would drag the whole scheme down to second order, so use the
        // two-point cubic Hermite midpoint value instead.
        const double dh =
            j0 < 0 ? history : 0.5 * (d0 + d1) + 0.125 * dt * (df(j0) - df(j1));
        const double k1 = f(x[k], d0);
        const double k2 = f(x[k] + 0.5 * dt * k1, dh);
        const double k3 = f(x[k] + 0.5 * dt * k2, dh);
        const double k4 = f(x[k] + dt * k3, d1);
        x[k + 1] = x[k] + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    RawSeries out;
    out.sample_interval = 1.0;
    out.values.resize(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i)
        out.values[i] = x[i * static_cast<std::size_t>(per_unit)];
    return out;
}

SupervisedDataset embed_mackey(const RawSeries& series) {
    if (series.sample_interval != 1.0)
        throw std::invalid_argument("embed_mackey: series must be sampled at unit time");
    const std::size_t needed = kMackeyFirstT + kMackeyPatterns - 1 + kMackeyHorizon + 1;
    if (series.values.size() < needed)
        throw std::invalid_argument("embed_mackey: need at least " + std::to_string(needed)
                                    + " samples, got " + std::to_string(series.values.size()));
    for (double v : series.values)
        if (!std::isfinite(v)) throw std::invalid_argument("embed_mackey: non-finite sample");

    SupervisedDataset ds;
    ds.name = "mackey-glass";
    ds.inputs = Matrix(kMackeyPatterns, 4);
    ds.targets.resize(kMackeyPatterns);
    for (std::size_t p = 0; p < kMackeyPatterns; ++p) {
        const std::size_t t = kMackeyFirstT + p;
        for (std::size_t c = 0; c < 4; ++c) ds.inputs(p, c) = series.values[t - kMackeyLags[c]];
        ds.targets[p] = series.values[t + kMackeyHorizon];
    }
    ds.split_index = kMackeySplit;
    return ds;
}

SupervisedDataset load_gas_furnace(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    if (table.values.cols() != 2)
        throw std::invalid_argument("load_gas_furnace: " + path.string() + " must have 2 columns, has "
                                    + std::to_string(table.values.cols()));
    const std::size_t m = table.values.rows();
    if (m < kFurnacePatterns + 1)
        throw std::invalid_argument("load_gas_furnace: " + path.string() + " has "
                                    + std::to_string(m) + " observations, need at least "
                                    + std::to_string(kFurnacePatterns + 1));

    SupervisedDataset ds;
    ds.name = "gas-furnace";
    ds.inputs = Matrix(kFurnacePatterns, 2);
    ds.targets.resize(kFurnacePatterns);
    for (std::size_t t = 0; t < kFurnacePatterns; ++t) {
        ds.inputs(t, 0) = table.values(t, 0);
        ds.inputs(t, 1) = table.values(t, 1);
        ds.targets[t] = table.values(t + 1, 1);
    }
    ds.split_index = kFurnaceSplit;
    return ds;
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
    if (series.empty()) throw std::invalid_argument("moving_average: empty series");
    if (window < 1) throw std::invalid_argument("moving_average: window must be >= 1");

    std::vector<double> out(series.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        sum += series[t];
        if (t >= window) sum -= series[t - window];
        out[t] = sum / static_cast<double>(std::min(t + 1, window));
    }
    return out;
}

SupervisedDataset load_wastewater(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path))
        throw std::invalid_argument(
            "load_wastewater: " + path.string()
            + " not found. The recorded plant influent series is distributed with its original "
              "study and is not bundled here; supply it (or a stand-in from "
              "synthetic_wastewater_series) as a single-column hourly CSV with at least 476 values.");
    const CsvTable table = read_csv(path);
    if (table.values.cols() != 1)
        throw std::invalid_argument("load_wastewater: " + path.string()
                                    + " must have exactly 1 column, has "
                                    + std::to_string(table.values.cols()));
    const std::size_t m = table.values.rows();
    if (m < 476)
        throw std::invalid_argument("load_wastewater: " + path.string() + " has "
                                    + std::to_string(m) + " values, need at least 476");

    std::vector<double> flow(m);
    for (std::size_t i = 0; i < m; ++i) flow[i] = table.values(i, 0);
    const auto ma_short = moving_average(flow, kWasteShortMa);
    const auto ma_long = moving_average(flow, kWasteLongMa);

    const std::size_t patterns = std::min(m - 2, kWastePatterns);
    SupervisedDataset ds;
    ds.name = "wastewater";
    ds.inputs = Matrix(patterns, 4);
    ds.targets.resize(patterns);
    for (std::size_t p = 0; p < patterns; ++p) {
        const std::size_t t = p + 1;
        ds.inputs(p, 0) = flow[t];
        ds.inputs(p, 1) = flow[t - 1];
        ds.inputs(p, 2) = ma_short[t];
        ds.inputs(p, 3) = ma_long[t];
        ds.targets[p] = flow[t + 1];
    }
    ds.split_index = kWasteSplit;
    return ds;
}

RawSeries synthetic_wastewater_series(std::size_t n_values, std::uint64_t seed) {
    if (n_values == 0) throw std::invalid_argument("synthetic_wastewater_series: n_values must be >= 1");
    Rng rng(derive_seed(seed, 0x77617374));
    std::normal_distribution<double> noise(0.0, 2.5);

    RawSeries out;
    out.sample_interval = 1.0;
    out.values.resize(n_values);
    for (std::size_t t = 0; t < n_values; ++t) {
        const double hours = static_cast<double>(t);
        const double daily = 25.0 * std::sin(2.0 * std::numbers::pi * hours / 24.0);
        const double weekly = 10.0 * std::sin(2.0 * std::numbers::pi * hours / 168.0);
        const double surge = 5.0 * std::sin(2.0 * std::numbers::pi * hours / 6.0 + 1.0);
        out.values[t] = 100.0 + daily + weekly + surge + noise(rng);
    }
    return out;
}

SupervisedDataset normalize(const SupervisedDataset& dataset) {
    check_split(dataset, "normalize");
    if (dataset.normalization)
        throw std::invalid_argument("normalize: dataset is already normalized");

    const std::size_t d = dataset.inputs.cols();
    Normalization norm;
    norm.inputs.resize(d);

    auto fit = [&](auto&& value_at, const std::string& label) {
        ColumnRange r{value_at(std::size_t{0}), value_at(std::size_t{0})};
        for (std::size_t p = 1; p < dataset.split_index; ++p) {
            r.min = std::min(r.min, value_at(p));
            r.max = std::max(r.max, value_at(p));
        }
        if (!(r.max > r.min))
            throw std::invalid_argument("normalize: " + label
                                        + " is constant over the training portion");
        return r;
    };
    for (std::size_t c = 0; c < d; ++c)
        norm.inputs[c] = fit([&](std::size_t p) { return dataset.inputs(p, c); },
                             "input column " + std::to_string(c));
    norm.target = fit([&](std::size_t p) { return dataset.targets[p]; }, "target column");

    SupervisedDataset out = dataset;
    for (std::size_t p = 0; p < out.pattern_count(); ++p) {
        for (std::size_t c = 0; c < d; ++c)
            out.inputs(p, c) =
                (out.inputs(p, c) - norm.inputs[c].min) / (norm.inputs[c].max - norm.inputs[c].min);
        out.targets[p] = (out.targets[p] - norm.target.min) / (norm.target.max - norm.target.min);
    }
    out.normalization = std::move(norm);
    return out;
}

double normalize_target(const Normalization& norm, double raw) {
    return (raw - norm.target.min) / (norm.target.max - norm.target.min);
}

double denormalize_target(const Normalization& norm, double normalized) {
    return norm.target.min + normalized * (norm.target.max - norm.target.min);
}

EvaluationBatch train_batch(const SupervisedDataset& dataset) {
    check_split(dataset, "train_batch");
    return slice_batch(dataset, 0, dataset.split_index);
}

EvaluationBatch test_batch(const SupervisedDataset& dataset) {
    check_split(dataset, "test_batch");
    return slice_batch(dataset, dataset.split_index, dataset.pattern_count());
}

std::pair<EvaluationBatch, EvaluationBatch> carve_holdout(const SupervisedDataset& dataset) {
    check_split(dataset, "carve_holdout");
    if (dataset.split_index < 2)
        throw std::invalid_argument("carve_holdout: need at least 2 training patterns");
    const std::size_t tail = std::max<std::size_t>(1, dataset.split_index / 5);
    const std::size_t head = dataset.split_index - tail;
    return {slice_batch(dataset, 0, head), slice_batch(dataset, head, dataset.split_index)};
}

void save_dataset(const SupervisedDataset& dataset, const std::filesystem::path& csv_path) {
    check_split(dataset, "save_dataset");

    const std::size_t d = dataset.inputs.cols();
    Matrix joined(dataset.pattern_count(), d + 1);
    std::vector<std::string> header;
    for (std::size_t c = 0; c < d; ++c) header.push_back("in" + std::to_string(c));
    header.push_back("target");
    for (std::size_t p = 0; p < dataset.pattern_count(); ++p) {
        for (std::size_t c = 0; c < d; ++c) joined(p, c) = dataset.inputs(p, c);
        joined(p, d) = dataset.targets[p];
    }
    write_csv(csv_path, header, joined);

    nlohmann::json meta;
    meta["name"] = dataset.name;
    meta["split_index"] = dataset.split_index;
    meta["inputs"] = d;
    if (dataset.normalization) {
        nlohmann::json n;
        n["inputs"] = nlohmann::json::array();
        for (const auto& r : dataset.normalization->inputs)
            n["inputs"].push_back({{"min", r.min}, {"max", r.max}});
        n["target"] = {{"min", dataset.normalization->target.min},
                       {"max", dataset.normalization->target.max}};
        meta["normalization"] = std::move(n);
    } else {
        meta["normalization"] = nullptr;
    }

    const auto meta_path = csv_path.string() + ".json";
    std::ofstream out(meta_path);
    if (!out) throw std::invalid_argument("save_dataset: cannot open " + meta_path + " for writing");
    out << meta.dump(2) << '\n';
    if (!out) throw std::runtime_error("save_dataset: write to " + meta_path + " failed");
}

SupervisedDataset load_dataset(const std::filesystem::path& csv_path) {
    const auto meta_path = csv_path.string() + ".json";
    std::ifstream in(meta_path);
    if (!in)
        throw std::invalid_argument("load_dataset: cannot open sidecar " + meta_path);
    nlohmann::json meta;
    try {
        in >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("load_dataset: invalid sidecar " + meta_path + ": " + e.what());
    }

    const CsvTable table = read_csv(csv_path);
    SupervisedDataset ds;
    try {
        ds.name = meta.at("name").get<std::string>();
        ds.split_index = meta.at("split_index").get<std::size_t>();
        const auto d = meta.at("inputs").get<std::size_t>();
        if (table.values.cols() != d + 1)
            throw std::invalid_argument("load_dataset: " + csv_path.string() + " has "
                                        + std::to_string(table.values.cols()) + " columns, sidecar says "
                                        + std::to_string(d + 1));
        ds.inputs = Matrix(table.values.rows(), d);
        ds.targets.resize(table.values.rows());
        for (std::size_t p = 0; p < table.values.rows(); ++p) {
            for (std::size_t c = 0; c < d; ++c) ds.inputs(p, c) = table.values(p, c);
            ds.targets[p] = table.values(p, d);
        }
        if (!meta.at("normalization").is_null()) {
            const auto& n = meta.at("normalization");
            Normalization norm;
            for (const auto& r : n.at("inputs"))
                norm.inputs.push_back({r.at("min").get<double>(), r.at("max").get<double>()});
            norm.target = {n.at("target").at("min").get<double>(),
                           n.at("target").at("max").get<double>()};
            if (norm.inputs.size() != d)
                throw std::invalid_argument("load_dataset: normalization entry count mismatch");
            ds.normalization = std::move(norm);
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("load_dataset: invalid sidecar " + meta_path + ": " + e.what());
    }
    check_split(ds, "load_dataset");
    return ds;
}

}  // namespace eann
