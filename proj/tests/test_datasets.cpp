#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"

#include "eann/csv.hpp"
#include "eann/datasets.hpp"
#include "eann/rng.hpp"
#include "oracles.hpp"

namespace {

using namespace eann;

// Scratch directory removed when the test block ends.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path()
               / ("eann-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

void write_text_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    REQUIRE(out.good());
    out << text;
}

void write_single_column(const std::filesystem::path& p, const std::vector<double>& values) {
    std::ofstream out(p);
    REQUIRE(out.good());
    for (double v : values) out << format_double(v) << '\n';
}

// 2 inputs, 6 patterns, split 4; the test portion deliberately exceeds the
// training ranges so train-only fitting is observable.
SupervisedDataset hand_dataset() {
    SupervisedDataset ds;
    ds.name = "hand";
    ds.inputs = Matrix(6, 2);
    const double col0[] = {2.0, 4.0, 6.0, 8.0, 10.0, 0.0};
    const double col1[] = {1.0, 3.0, 2.0, 1.5, 2.5, 2.5};
    for (std::size_t p = 0; p < 6; ++p) {
        ds.inputs(p, 0) = col0[p];
        ds.inputs(p, 1) = col1[p];
    }
    ds.targets = {10.0, 20.0, 15.0, 12.0, 25.0, 5.0};
    ds.split_index = 4;
    return ds;
}

}  // namespace

TEST_CASE("flow generator holds its fixed points exactly") {
    const auto ones = mackey_glass_generate(50, 0.1, 17.0, 1.0, 1.0);
    REQUIRE(ones.values.size() == 50);
    for (double v : ones.values) CHECK(v == 1.0);

    const auto zeros = mackey_glass_generate(50, 0.1, 17.0, 0.0, 0.0);
    for (double v : zeros.values) CHECK(v == 0.0);
}

TEST_CASE("halving the integrator step barely moves the trajectory") {
    const auto coarse = mackey_glass_generate(101, 0.1);
    const auto fine = mackey_glass_generate(101, 0.05);
    REQUIRE(coarse.values.size() == fine.values.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < coarse.values.size(); ++i)
        worst = std::max(worst, std::fabs(coarse.values[i] - fine.values[i]));
    CHECK(worst < 1e-3);
    // The trajectory is genuinely nontrivial: it leaves the initial value.
    CHECK(std::fabs(coarse.values.back() - coarse.values.front()) > 0.01);
}

TEST_CASE("generator accepts only steps that divide both the delay and the unit") {
    CHECK_NOTHROW(mackey_glass_generate(10, 0.25));   // 17/0.25 = 68, 1/0.25 = 4
    CHECK_NOTHROW(mackey_glass_generate(10, 1.0));
    CHECK_THROWS_WITH_AS(mackey_glass_generate(10, 0.3), doctest::Contains("tau/dt"),
                         std::invalid_argument);
    // 17/1.7 = 10 exactly, so only the unit-spacing check can fire.
    CHECK_THROWS_WITH_AS(mackey_glass_generate(10, 1.7), doctest::Contains("1/dt"),
                         std::invalid_argument);
    CHECK_THROWS_AS(mackey_glass_generate(0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(mackey_glass_generate(10, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(mackey_glass_generate(10, 0.1, 0.0), std::invalid_argument);
    const double nan = std::nan("");
    CHECK_THROWS_AS(mackey_glass_generate(10, 0.1, 17.0, nan), std::invalid_argument);
    CHECK_THROWS_AS(mackey_glass_generate(10, 0.1, 17.0, 1.2, nan), std::invalid_argument);
}

TEST_CASE("generator output is sampled at unit time from the requested start") {
    const auto s = mackey_glass_generate(20, 0.1, 17.0, 1.2);
    CHECK(s.sample_interval == 1.0);
    CHECK(s.values.size() == 20);
    CHECK(s.values[0] == 1.2);
    for (double v : s.values) CHECK(std::isfinite(v));
}

TEST_CASE("embedding picks lags 18/12/6/0 and a 6-step-ahead target") {
    // A counting series makes every lag readable: value at index i is i.
    RawSeries series;
    series.sample_interval = 1.0;
    series.values.resize(1024);
    for (std::size_t i = 0; i < series.values.size(); ++i)
        series.values[i] = static_cast<double>(i);

    const auto ds = embed_mackey(series);
    CHECK(ds.name == "mackey-glass");
    CHECK(ds.pattern_count() == 1000);
    CHECK(ds.split_index == 500);
    CHECK(ds.inputs.cols() == 4);
    CHECK_FALSE(ds.normalization.has_value());
    for (std::size_t p = 0; p < ds.pattern_count(); ++p) {
        const double t = static_cast<double>(18 + p);
        CHECK(ds.inputs(p, 0) == t - 18.0);
        CHECK(ds.inputs(p, 1) == t - 12.0);
        CHECK(ds.inputs(p, 2) == t - 6.0);
        CHECK(ds.inputs(p, 3) == t);
        CHECK(ds.targets[p] == t + 6.0);
    }
}

TEST_CASE("embedding rejects short, rescaled, or non-finite series") {
    RawSeries series;
    series.values.assign(1023, 0.5);
    CHECK_THROWS_WITH_AS(embed_mackey(series), doctest::Contains("1024"), std::invalid_argument);

    series.values.assign(1024, 0.5);
    series.sample_interval = 0.5;
    CHECK_THROWS_WITH_AS(embed_mackey(series), doctest::Contains("unit time"),
                         std::invalid_argument);

    series.sample_interval = 1.0;
    series.values[700] = std::nan("");
    CHECK_THROWS_WITH_AS(embed_mackey(series), doctest::Contains("non-finite"),
                         std::invalid_argument);
}

TEST_CASE("furnace loader pairs both measurements with the next concentration") {
    const auto ds = load_gas_furnace(std::filesystem::path(EANN_TEST_DATA_DIR) / "gas_furnace.csv");
    CHECK(ds.name == "gas-furnace");
    CHECK(ds.pattern_count() == 292);
    CHECK(ds.split_index == 146);
    CHECK(ds.inputs.cols() == 2);

    CHECK(ds.inputs(0, 0) == -0.109);
    CHECK(ds.inputs(0, 1) == 53.8);
    CHECK(ds.targets[0] == 53.6);
    CHECK(ds.inputs(1, 0) == 0.000);
    CHECK(ds.inputs(1, 1) == 53.6);
    CHECK(ds.targets[1] == 53.5);
    CHECK(ds.inputs(5, 0) == 0.441);
    CHECK(ds.inputs(5, 1) == 53.1);
    CHECK(ds.targets[5] == 52.7);
    // Each target is the next row's concentration column.
    for (std::size_t p = 0; p + 1 < ds.pattern_count(); ++p)
        CHECK(ds.targets[p] == ds.inputs(p + 1, 1));
}

TEST_CASE("furnace loader rejects wrong shapes") {
    TempDir tmp;
    const auto three_cols = tmp.path / "three.csv";
    write_text_file(three_cols, "1,2,3\n4,5,6\n");
    CHECK_THROWS_WITH_AS(load_gas_furnace(three_cols), doctest::Contains("2 columns"),
                         std::invalid_argument);

    const auto short_file = tmp.path / "short.csv";
    std::string body;
    for (int i = 0; i < 100; ++i) body += "0.1,50.0\n";
    write_text_file(short_file, body);
    CHECK_THROWS_WITH_AS(load_gas_furnace(short_file), doctest::Contains("need at least 293"),
                         std::invalid_argument);
}

TEST_CASE("trailing mean matches a recomputed-window oracle") {
    const std::vector<double> tiny = {1.0, 2.0, 3.0, 4.0};
    const auto ma2 = moving_average(tiny, 2);
    CHECK(ma2 == std::vector<double>{1.0, 1.5, 2.5, 3.5});

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(-5.0, 5.0);
    std::vector<double> series(100);
    for (double& v : series) v = unit(rng);

    for (std::size_t window : {std::size_t{1}, std::size_t{2}, std::size_t{5}, std::size_t{12},
                               std::size_t{24}, std::size_t{100}, std::size_t{150}}) {
        const auto fast = moving_average(series, window);
        const auto slow = oracle::naive_moving_average(series, window);
        REQUIRE(fast.size() == slow.size());
        // The running sum drifts by rounding relative to the fresh-sum oracle.
        for (std::size_t t = 0; t < fast.size(); ++t)
            CHECK(fast[t] == doctest::Approx(slow[t]).epsilon(1e-10));
    }
    CHECK(moving_average(tiny, 1) == tiny);

    CHECK_THROWS_AS(moving_average(std::vector<double>{}, 2), std::invalid_argument);
    CHECK_THROWS_AS(moving_average(series, 0), std::invalid_argument);
}

TEST_CASE("flow loader builds lag and trailing-mean inputs") {
    TempDir tmp;
    // A counting series makes the expected inputs closed-form.
    std::vector<double> flow(500);
    for (std::size_t i = 0; i < flow.size(); ++i) flow[i] = static_cast<double>(i);
    const auto csv = tmp.path / "flow.csv";
    write_single_column(csv, flow);

    const auto ds = load_wastewater(csv);
    CHECK(ds.name == "wastewater");
    CHECK(ds.pattern_count() == 475);  // min(500 - 2, 475)
    CHECK(ds.split_index == 240);
    CHECK(ds.inputs.cols() == 4);
    for (std::size_t p = 0; p < ds.pattern_count(); ++p) {
        const double t = static_cast<double>(p + 1);
        CHECK(ds.inputs(p, 0) == t);
        CHECK(ds.inputs(p, 1) == t - 1.0);
        // Trailing mean of 0..t over the last w terms.
        const double ma12 = p + 1 >= 11 ? t - 5.5 : t / 2.0;
        const double ma24 = p + 1 >= 23 ? t - 11.5 : t / 2.0;
        CHECK(ds.inputs(p, 2) == doctest::Approx(ma12).epsilon(1e-12));
        CHECK(ds.inputs(p, 3) == doctest::Approx(ma24).epsilon(1e-12));
        CHECK(ds.targets[p] == t + 1.0);
    }
}

TEST_CASE("flow loader caps the pattern count and keeps the mean windows honest") {
    TempDir tmp;
    const auto series = synthetic_wastewater_series(600, 7);
    const auto csv = tmp.path / "synthetic.csv";
    write_single_column(csv, series.values);

    const auto ds = load_wastewater(csv);
    CHECK(ds.pattern_count() == 475);  // min(600 - 2, 475)

    const auto ma12 = oracle::naive_moving_average(series.values, 12);
    const auto ma24 = oracle::naive_moving_average(series.values, 24);
    for (std::size_t p = 0; p < ds.pattern_count(); ++p) {
        CHECK(ds.inputs(p, 0) == series.values[p + 1]);
        CHECK(ds.inputs(p, 1) == series.values[p]);
        CHECK(ds.inputs(p, 2) == doctest::Approx(ma12[p + 1]).epsilon(1e-9));
        CHECK(ds.inputs(p, 3) == doctest::Approx(ma24[p + 1]).epsilon(1e-9));
        CHECK(ds.targets[p] == series.values[p + 2]);
    }

    // The minimum accepted length yields two patterns fewer than the cap.
    std::vector<double> minimal(series.values.begin(), series.values.begin() + 476);
    const auto min_csv = tmp.path / "minimal.csv";
    write_single_column(min_csv, minimal);
    CHECK(load_wastewater(min_csv).pattern_count() == 474);
}

TEST_CASE("flow loader explains what is missing") {
    TempDir tmp;
    CHECK_THROWS_WITH_AS(load_wastewater(tmp.path / "absent.csv"), doctest::Contains("not found"),
                         std::invalid_argument);

    const auto short_csv = tmp.path / "short.csv";
    write_single_column(short_csv, std::vector<double>(400, 1.0));
    CHECK_THROWS_WITH_AS(load_wastewater(short_csv), doctest::Contains("need at least 476"),
                         std::invalid_argument);

    const auto wide_csv = tmp.path / "wide.csv";
    write_text_file(wide_csv, "1,2\n3,4\n");
    CHECK_THROWS_WITH_AS(load_wastewater(wide_csv), doctest::Contains("exactly 1 column"),
                         std::invalid_argument);
}

TEST_CASE("synthetic flow series is seeded and plausible") {
    const auto a = synthetic_wastewater_series(2000, 7);
    const auto b = synthetic_wastewater_series(2000, 7);
    CHECK(a.values == b.values);
    CHECK(a.sample_interval == 1.0);

    const auto c = synthetic_wastewater_series(2000, 8);
    CHECK(a.values != c.values);

    double sum = 0.0;
    for (double v : a.values) {
        CHECK(std::isfinite(v));
        sum += v;
    }
    CHECK(std::fabs(sum / 2000.0 - 100.0) < 1.5);  // cycles and noise average out

    CHECK_THROWS_AS(synthetic_wastewater_series(0, 7), std::invalid_argument);
}

TEST_CASE("normalization fits on the training portion only") {
    const auto ds = normalize(hand_dataset());
    REQUIRE(ds.normalization.has_value());
    const auto& norm = *ds.normalization;
    CHECK(norm.inputs.size() == 2);
    CHECK(norm.inputs[0] == ColumnRange{2.0, 8.0});  // test rows 10 and 0 ignored
    CHECK(norm.inputs[1] == ColumnRange{1.0, 3.0});
    CHECK(norm.target == ColumnRange{10.0, 20.0});

    const double col0[] = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0, 4.0 / 3.0, -1.0 / 3.0};
    const double col1[] = {0.0, 1.0, 0.5, 0.25, 0.75, 0.75};
    const double tgt[] = {0.0, 1.0, 0.5, 0.2, 1.5, -0.5};
    for (std::size_t p = 0; p < 6; ++p) {
        CHECK(ds.inputs(p, 0) == doctest::Approx(col0[p]).epsilon(1e-12));
        CHECK(ds.inputs(p, 1) == doctest::Approx(col1[p]).epsilon(1e-12));
        CHECK(ds.targets[p] == doctest::Approx(tgt[p]).epsilon(1e-12));
    }
    CHECK(ds.name == "hand");
    CHECK(ds.split_index == 4);
}

TEST_CASE("target maps invert each other") {
    const auto ds = normalize(hand_dataset());
    const auto& norm = *ds.normalization;
    CHECK(normalize_target(norm, 15.0) == doctest::Approx(0.5));
    CHECK(denormalize_target(norm, 0.5) == doctest::Approx(15.0));
    for (double raw : {-3.0, 0.0, 10.0, 14.7, 20.0, 55.0})
        CHECK(denormalize_target(norm, normalize_target(norm, raw)) == doctest::Approx(raw));
}

TEST_CASE("normalization refuses degenerate or repeated requests") {
    CHECK_THROWS_WITH_AS(normalize(normalize(hand_dataset())),
                         doctest::Contains("already normalized"), std::invalid_argument);

    auto flat_input = hand_dataset();
    for (std::size_t p = 0; p < 4; ++p) flat_input.inputs(p, 1) = 5.0;  // test rows still vary
    CHECK_THROWS_WITH_AS(normalize(flat_input),
                         doctest::Contains("input column 1 is constant over the training portion"),
                         std::invalid_argument);

    auto flat_target = hand_dataset();
    for (std::size_t p = 0; p < 4; ++p) flat_target.targets[p] = 9.0;
    CHECK_THROWS_WITH_AS(normalize(flat_target),
                         doctest::Contains("target column is constant"), std::invalid_argument);
}

TEST_CASE("split batches reproduce the pattern rows") {
    const auto ds = hand_dataset();
    const auto train = train_batch(ds);
    const auto test = test_batch(ds);
    CHECK(train.inputs.rows() == 4);
    CHECK(train.inputs.cols() == 2);
    CHECK(train.targets.size() == 4);
    CHECK(test.inputs.rows() == 2);
    CHECK(test.targets.size() == 2);
    for (std::size_t p = 0; p < 4; ++p) {
        CHECK(train.inputs(p, 0) == ds.inputs(p, 0));
        CHECK(train.targets[p] == ds.targets[p]);
    }
    for (std::size_t p = 0; p < 2; ++p) {
        CHECK(test.inputs(p, 1) == ds.inputs(4 + p, 1));
        CHECK(test.targets[p] == ds.targets[4 + p]);
    }
}

TEST_CASE("holdout carving takes the trailing fifth of the training split") {
    const auto ds = hand_dataset();  // split 4: tail max(1, 0) = 1
    const auto [head, tail] = carve_holdout(ds);
    CHECK(head.targets.size() == 3);
    CHECK(tail.targets.size() == 1);
    CHECK(head.targets == std::vector<double>{10.0, 20.0, 15.0});
    CHECK(tail.targets == std::vector<double>{12.0});

    SupervisedDataset wide;
    wide.name = "wide";
    wide.inputs = Matrix(12, 1);
    wide.targets.resize(12);
    for (std::size_t p = 0; p < 12; ++p) {
        wide.inputs(p, 0) = static_cast<double>(p);
        wide.targets[p] = static_cast<double>(100 + p);
    }
    wide.split_index = 10;  // tail max(1, 2) = 2
    const auto [h2, t2] = carve_holdout(wide);
    CHECK(h2.targets.size() == 8);
    CHECK(t2.targets.size() == 2);
    CHECK(t2.targets == std::vector<double>{108.0, 109.0});
    CHECK(t2.inputs(0, 0) == 8.0);

    wide.split_index = 1;
    CHECK_THROWS_WITH_AS(carve_holdout(wide), doctest::Contains("at least 2 training patterns"),
                         std::invalid_argument);
}

TEST_CASE("batch slicing validates the split invariants") {
    auto ds = hand_dataset();
    ds.split_index = 0;
    CHECK_THROWS_WITH_AS(train_batch(ds), doctest::Contains("split index 0"),
                         std::invalid_argument);
    ds.split_index = 6;
    CHECK_THROWS_AS(test_batch(ds), std::invalid_argument);
    ds.split_index = 4;
    ds.targets.pop_back();
    CHECK_THROWS_WITH_AS(train_batch(ds), doctest::Contains("row count"), std::invalid_argument);
}

TEST_CASE("dataset files round trip exactly") {
    TempDir tmp;

    const auto raw = hand_dataset();
    const auto raw_csv = tmp.path / "raw.csv";
    save_dataset(raw, raw_csv);
    CHECK(std::filesystem::exists(tmp.path / "raw.csv.json"));
    CHECK(load_dataset(raw_csv) == raw);

    const auto cooked = normalize(hand_dataset());
    const auto cooked_csv = tmp.path / "cooked.csv";
    save_dataset(cooked, cooked_csv);
    CHECK(load_dataset(cooked_csv) == cooked);

    // The shortest-round-trip float format also survives awkward values.
    auto awkward = hand_dataset();
    awkward.inputs(2, 1) = 0.1 + 0.2;
    awkward.targets[3] = 1.0 / 3.0;
    const auto awk_csv = tmp.path / "awkward.csv";
    save_dataset(awkward, awk_csv);
    CHECK(load_dataset(awk_csv) == awkward);
}

TEST_CASE("dataset loading rejects missing or damaged sidecars") {
    TempDir tmp;
    const auto csv = tmp.path / "ds.csv";
    save_dataset(hand_dataset(), csv);

    const auto sidecar = tmp.path / "ds.csv.json";
    SUBCASE("missing sidecar") {
        std::filesystem::remove(sidecar);
        CHECK_THROWS_WITH_AS(load_dataset(csv), doctest::Contains("cannot open sidecar"),
                             std::invalid_argument);
    }
    SUBCASE("unparseable sidecar") {
        write_text_file(sidecar, "{not json");
        CHECK_THROWS_WITH_AS(load_dataset(csv), doctest::Contains("invalid sidecar"),
                             std::invalid_argument);
    }
    SUBCASE("sidecar missing a field") {
        write_text_file(sidecar, "{\"split_index\": 4}");
        CHECK_THROWS_WITH_AS(load_dataset(csv), doctest::Contains("invalid sidecar"),
                             std::invalid_argument);
    }
    SUBCASE("sidecar disagrees about the column count") {
        write_text_file(sidecar,
                        "{\"name\": \"hand\", \"split_index\": 4, \"inputs\": 3,"
                        " \"normalization\": null}");
        CHECK_THROWS_WITH_AS(load_dataset(csv), doctest::Contains("sidecar says"),
                             std::invalid_argument);
    }
    SUBCASE("sidecar with an out-of-range split") {
        write_text_file(sidecar,
                        "{\"name\": \"hand\", \"split_index\": 6, \"inputs\": 2,"
                        " \"normalization\": null}");
        CHECK_THROWS_WITH_AS(load_dataset(csv), doctest::Contains("split index 6"),
                             std::invalid_argument);
    }
}
