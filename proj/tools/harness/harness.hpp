#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eann/datasets.hpp"
#include "eann/evolution.hpp"
#include "eann/trainers.hpp"

namespace eann::harness {

enum class DatasetKind { mackey, gas_furnace, wastewater };

std::string_view dataset_tag(DatasetKind kind);
std::optional<DatasetKind> parse_dataset_tag(std::string_view tag);

// Which training algorithms an experiment covers: one run per kind in
// `fixed`, or a single run letting the genome pick when `evolved` is set.
struct TrainerSelection {
    bool evolved = false;
    std::vector<TrainerKind> fixed;  // ignored when evolved
};

struct ExperimentConfig {
    DatasetKind dataset = DatasetKind::mackey;
    std::string data_file;  // required for wastewater; optional elsewhere

    // Generator parameters (mackey only; ignored when data_file is set).
    std::size_t samples = 1024;
    double dt = 0.1;
    double tau = 17.0;
    double x0 = 1.2;

    EvolutionConfig evolution;
    TrainerSelection trainers{false, {TrainerKind::BP, TrainerKind::SCG,
                                      TrainerKind::QNA, TrainerKind::LM}};
    std::size_t repetitions = 3;
    std::string output_dir;

    // Fixed-architecture commands.
    std::string architecture = "24 T*";
    std::size_t baseline_epochs = 2500;
    std::optional<std::array<double, 4>> trainer_params;  // midpoints when absent
};

// Flat key=value text, '#' comments. Unknown keys are rejected; values use
// the same spellings as the CLI flags. Returns the keys that were set.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);
void apply_config_entry(ExperimentConfig& config, const std::string& key, const std::string& value);

struct SummaryRow {
    std::string dataset;
    std::string mode;  // "evolve", "baseline", or "train"
    std::string trainer;
    double train_rmse = 0.0;
    double test_rmse = 0.0;
    std::string architecture;
    std::uint64_t seed = 0;

    bool operator==(const SummaryRow&) const = default;
};

// Normalized dataset plus the batches every command needs.
struct PreparedData {
    SupervisedDataset dataset;  // normalized
    EvaluationBatch train;      // evolution training patterns
    EvaluationBatch fitness;    // fitness signal (test split or carved holdout)
    EvaluationBatch full_train; // whole training split, for reported train RMSE
    EvaluationBatch test;
};

PreparedData prepare_data(const ExperimentConfig& config);

// Each command writes a self-describing artifact directory (config.json,
// summary.txt/csv, per-trainer reports, traces, predictions) and returns
// its summary rows. Repetition k runs with a seed derived from (seed, k);
// the worst test RMSE across repetitions is the reported row.
std::vector<SummaryRow> run_evolve(const ExperimentConfig& config);
std::vector<SummaryRow> run_baseline(const ExperimentConfig& config);
std::vector<SummaryRow> run_train(const ExperimentConfig& config);

void run_gen_data(const ExperimentConfig& config, const std::filesystem::path& out_csv);

// Reads summary rows back from an artifact directory (its summary.csv) or
// directly from a summary/merged CSV file.
std::vector<SummaryRow> load_summary(const std::filesystem::path& path);

struct MergedReport {
    std::vector<SummaryRow> rows;
    std::vector<std::size_t> best_per_dataset;  // row indices carrying the dagger
};

MergedReport merge_reports(const std::vector<std::vector<SummaryRow>>& sources);
std::string render_table(const MergedReport& merged);
void write_merged_csv(const MergedReport& merged, const std::filesystem::path& path);

// RFC-4180-style row IO for tables that mix text and numbers.
std::string csv_escape(const std::string& field);
std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path);

}  // namespace eann::harness
