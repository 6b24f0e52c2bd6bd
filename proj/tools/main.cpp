#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "harness/harness.hpp"

namespace {

using eann::TrainerKind;
using namespace eann::harness;

// Flag values parsed by CLI11; applied onto ExperimentConfig only when the
// flag was actually given, so precedence is CLI > config file > defaults.
struct Flags {
    std::string config_file;
    std::string dataset;
    std::string data_file;
    std::string trainer;
    std::string fitness_split;
    std::string arch;
    std::string out;
    std::size_t population = 0;
    std::size_t generations = 0;
    std::size_t max_hidden = 0;
    std::size_t epochs = 0;
    std::size_t repetitions = 0;
    std::size_t threads = 0;
    std::size_t samples = 0;
    double elitism = 0.0;
    double selection = 0.0;
    double mutation = 0.0;
    double target_rmse = 0.0;
    double dt = 0.0;
    double tau = 0.0;
    double x0 = 0.0;
    std::uint64_t seed = 0;
    bool lamarckian = false;
    bool baldwinian = false;
    std::vector<double> params;
};

void add_data_flags(CLI::App& cmd, Flags& f) {
    cmd.add_option("--dataset", f.dataset, "Dataset: mackey-glass, gas-furnace, or wastewater");
    cmd.add_option("--data-file", f.data_file, "CSV file backing the dataset");
    cmd.add_option("--samples", f.samples, "Generated series length in unit-time samples");
    cmd.add_option("--dt", f.dt, "Integration step for the generated series");
    cmd.add_option("--tau", f.tau, "Delay of the generated series");
    cmd.add_option("--x0", f.x0, "Initial value of the generated series");
    cmd.add_option("--seed", f.seed, "Master seed; repetition k derives its own from it");
}

void add_common_flags(CLI::App& cmd, Flags& f) {
    cmd.add_option("--config", f.config_file, "key=value config file (flags override it)");
    cmd.add_option("--out", f.out, "Artifact directory");
    add_data_flags(cmd, f);
}

// Per-flag apply keeps this honest: only flags the user typed override the
// config file, and every spelling maps onto one config key.
bool flag_given(const CLI::App& cmd, const std::string& name) {
    const CLI::Option* opt = cmd.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
}

void apply_flags(const CLI::App& cmd, const Flags& f, ExperimentConfig& config) {
    const auto set = [&](const std::string& name) { return flag_given(cmd, name); };
    if (set("--dataset")) apply_config_entry(config, "dataset", f.dataset);
    if (set("--data-file")) config.data_file = f.data_file;
    if (set("--samples")) config.samples = f.samples;
    if (set("--dt")) config.dt = f.dt;
    if (set("--tau")) config.tau = f.tau;
    if (set("--x0")) config.x0 = f.x0;
    if (set("--seed")) config.evolution.seed = f.seed;
    if (set("--trainer")) apply_config_entry(config, "trainer", f.trainer);
    if (set("--population")) config.evolution.population_size = f.population;
    if (set("--generations")) config.evolution.max_generations = f.generations;
    if (set("--max-hidden")) config.evolution.max_hidden = f.max_hidden;
    if (set("--elitism")) config.evolution.elitism_fraction = f.elitism;
    if (set("--selection")) config.evolution.selection_fraction = f.selection;
    if (set("--mutation")) config.evolution.mutation_rate = f.mutation;
    if (set("--fitness-split")) apply_config_entry(config, "fitness_split", f.fitness_split);
    if (set("--target-rmse")) config.evolution.target_rmse = f.target_rmse;
    if (set("--threads")) config.evolution.eval_threads = f.threads;
    if (set("--lamarckian")) config.evolution.lamarckian = true;
    if (set("--baldwinian")) config.evolution.lamarckian = false;
    if (set("--repetitions")) apply_config_entry(config, "repetitions", std::to_string(f.repetitions));
    if (set("--arch")) config.architecture = f.arch;
    if (set("--out")) config.output_dir = f.out;
}

ExperimentConfig build_config(const CLI::App& cmd, const Flags& f) {
    ExperimentConfig config;
    if (flag_given(cmd, "--config")) {
        for (const auto& [key, value] : read_config_file(f.config_file))
            apply_config_entry(config, key, value);
    }
    apply_flags(cmd, f, config);

    if (flag_given(cmd, "--params")) {
        if (config.trainers.evolved || config.trainers.fixed.size() != 1)
            throw std::invalid_argument("--params requires exactly one --trainer");
        const TrainerKind kind = config.trainers.fixed.front();
        if (f.params.size() != eann::trainer_param_count(kind))
            throw std::invalid_argument("--params: " + std::string(eann::trainer_tag(kind))
                                        + " takes "
                                        + std::to_string(eann::trainer_param_count(kind))
                                        + " values, got " + std::to_string(f.params.size()));
        eann::TrainerSpec spec = eann::default_spec(kind);
        for (std::size_t i = 0; i < f.params.size(); ++i) spec.params[i] = f.params[i];
        eann::validate_spec(spec);
        config.trainer_params = spec.params;
    }
    return config;
}

void default_output_dir(ExperimentConfig& config, const std::string& command) {
    if (config.output_dir.empty())
        config.output_dir = "eann-" + command + "-" + std::string(dataset_tag(config.dataset));
}

int run_report(const std::vector<std::string>& sources, const std::string& out) {
    std::vector<std::vector<SummaryRow>> loaded;
    bool any_failed = false;
    for (const auto& source : sources) {
        try {
            loaded.push_back(load_summary(source));
        } catch (const std::exception& e) {
            std::cerr << "skipping " << source << ": " << e.what() << "\n";
            any_failed = true;
        }
    }
    const MergedReport merged = merge_reports(loaded);
    std::cout << render_table(merged);
    if (!out.empty()) {
        write_merged_csv(merged, out);
        std::cout << "merged CSV -> " << out << "\n";
    }
    return any_failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evolves and trains feedforward time-series predictors"};
    app.require_subcommand(1);

    Flags f;
    std::vector<std::string> report_sources;
    std::string report_out;

    CLI::App* gen = app.add_subcommand("gen-data", "Generate or re-export a dataset as CSV");
    add_data_flags(*gen, f);
    gen->add_option("--out", f.out, "Output CSV path")->required();

    CLI::App* evolve = app.add_subcommand("evolve", "Evolve network architecture and weights");
    add_common_flags(*evolve, f);
    evolve->add_option("--trainer", f.trainer,
                       "all, evolved, or a comma list of BP, SCG, QNA, LM");
    evolve->add_option("--population", f.population, "Population size");
    evolve->add_option("--generations", f.generations, "Generation budget");
    evolve->add_option("--max-hidden", f.max_hidden, "Hidden-layer size cap (1..32)");
    evolve->add_option("--epochs", f.epochs, "Training epochs per fitness evaluation");
    evolve->add_option("--elitism", f.elitism, "Elite fraction");
    evolve->add_option("--selection", f.selection, "Parent pool fraction");
    evolve->add_option("--mutation", f.mutation, "Per-segment mutation probability");
    evolve->add_option("--fitness-split", f.fitness_split, "Fitness signal: test or holdout");
    evolve->add_option("--target-rmse", f.target_rmse, "Stop early at this fitness RMSE");
    evolve->add_option("--threads", f.threads, "Evaluation threads (0 = hardware)");
    evolve->add_flag("--lamarckian", f.lamarckian, "Write trained weights back (default)");
    evolve->add_flag("--baldwinian", f.baldwinian, "Keep genomes untouched by training");
    evolve->add_option("--repetitions", f.repetitions, "Independent repetitions");

    CLI::App* baseline = app.add_subcommand(
        "baseline", "Train a fixed hand-picked network with each trainer");
    add_common_flags(*baseline, f);
    baseline->add_option("--trainer", f.trainer, "Comma list of BP, SCG, QNA, LM, or all");
    baseline->add_option("--arch", f.arch, "Architecture, e.g. \"24 T*\" or \"8 T, 2 L\"");
    baseline->add_option("--epochs", f.epochs, "Training epochs");
    baseline->add_option("--repetitions", f.repetitions, "Independent repetitions");
    baseline->add_option("--params", f.params, "Trainer hyperparameters (requires one --trainer)");

    CLI::App* train = app.add_subcommand("train", "Train one network once and trace each epoch");
    add_common_flags(*train, f);
    train->add_option("--trainer", f.trainer, "One of BP, SCG, QNA, LM")->required();
    train->add_option("--arch", f.arch, "Architecture, e.g. \"11 T\"");
    train->add_option("--epochs", f.epochs, "Training epochs");
    train->add_option("--params", f.params, "Trainer hyperparameters");

    CLI::App* report = app.add_subcommand("report", "Merge artifact summaries into one table");
    report->add_option("sources", report_sources, "Artifact directories or summary CSV files")
        ->required();
    report->add_option("--out", report_out, "Write the merged table as CSV here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            ExperimentConfig config = build_config(*gen, f);
            run_gen_data(config, f.out);
        } else if (evolve->parsed()) {
            ExperimentConfig config = build_config(*evolve, f);
            if (evolve->count("--epochs")) config.evolution.epochs_per_eval = f.epochs;
            default_output_dir(config, "evolve");
            run_evolve(config);
        } else if (baseline->parsed()) {
            ExperimentConfig config = build_config(*baseline, f);
            if (baseline->count("--epochs")) config.baseline_epochs = f.epochs;
            default_output_dir(config, "baseline");
            run_baseline(config);
        } else if (train->parsed()) {
            ExperimentConfig config = build_config(*train, f);
            if (train->count("--epochs")) config.evolution.epochs_per_eval = f.epochs;
            if (config.trainers.evolved || config.trainers.fixed.size() != 1)
                throw std::invalid_argument("train: --trainer must name exactly one of BP, SCG, QNA, LM");
            default_output_dir(config, "train");
            run_train(config);
        } else if (report->parsed()) {
            return run_report(report_sources, report_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
