#include "harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "eann/csv.hpp"
#include "eann/rng.hpp"
#include "eann/serialization.hpp"

namespace eann::harness {

namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::size_t parse_count(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size() || v < 0) throw std::invalid_argument(value);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + ": '" + value + "' is not a count");
    }
}

std::uint64_t parse_u64(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + ": '" + value + "' is not an integer");
    }
}

bool parse_bool(const std::string& value, const std::string& key) {
    const std::string v = lower(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config: " + key + ": '" + value + "' is not a boolean");
}

TrainerSelection parse_trainers(const std::string& value) {
    const std::string v = lower(trim(value));
    if (v == "evolved") return {true, {}};
    if (v == "all")
        return {false, {TrainerKind::BP, TrainerKind::SCG, TrainerKind::QNA, TrainerKind::LM}};
    TrainerSelection sel;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto kind = parse_trainer_tag(trim(item));
        if (!kind)
            throw std::invalid_argument("config: trainer: '" + trim(item)
                                        + "' is not one of BP, SCG, QNA, LM, all, evolved");
        if (std::find(sel.fixed.begin(), sel.fixed.end(), *kind) == sel.fixed.end())
            sel.fixed.push_back(*kind);
    }
    if (sel.fixed.empty()) throw std::invalid_argument("config: trainer: empty selection");
    return sel;
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

json selection_json(const TrainerSelection& sel) {
    if (sel.evolved) return "evolved";
    json kinds = json::array();
    for (auto k : sel.fixed) kinds.push_back(std::string(trainer_tag(k)));
    return kinds;
}

json config_snapshot(const ExperimentConfig& c, const std::string& command) {
    json j;
    j["command"] = command;
    j["dataset"] = std::string(dataset_tag(c.dataset));
    j["data_file"] = c.data_file;
    j["samples"] = c.samples;
    j["dt"] = c.dt;
    j["tau"] = c.tau;
    j["x0"] = c.x0;
    j["seed"] = c.evolution.seed;
    j["repetitions"] = c.repetitions;
    j["trainers"] = selection_json(c.trainers);
    j["architecture"] = c.architecture;
    j["baseline_epochs"] = c.baseline_epochs;
    j["evolution"] = {{"population_size", c.evolution.population_size},
                      {"max_generations", c.evolution.max_generations},
                      {"max_hidden", c.evolution.max_hidden},
                      {"epochs_per_eval", c.evolution.epochs_per_eval},
                      {"elitism_fraction", c.evolution.elitism_fraction},
                      {"selection_fraction", c.evolution.selection_fraction},
                      {"mutation_rate", c.evolution.mutation_rate},
                      {"fitness_split", std::string(fitness_split_tag(c.evolution.fitness_split))},
                      {"lamarckian", c.evolution.lamarckian},
                      {"eval_threads", c.evolution.eval_threads}};
    j["evolution"]["target_rmse"] =
        c.evolution.target_rmse ? json(*c.evolution.target_rmse) : json(nullptr);
    if (c.trainer_params) {
        j["trainer_params"] = *c.trainer_params;
    } else {
        j["trainer_params"] = nullptr;
    }
    return j;
}

void write_predictions_csv(const std::filesystem::path& path, const NetworkPhenotype& net,
                           const EvaluationBatch& test, const Normalization& norm) {
    std::string text = "index,desired,predicted,desired_raw,predicted_raw\n";
    for (std::size_t p = 0; p < test.pattern_count(); ++p) {
        const double predicted = forward(net, test.inputs.row(p));
        const double desired = test.targets[p];
        text += std::to_string(p) + ',' + format_double(desired) + ',' + format_double(predicted)
                + ',' + format_double(denormalize_target(norm, desired)) + ','
                + format_double(denormalize_target(norm, predicted)) + '\n';
    }
    write_text(path, text);
}

void write_epoch_trace_csv(const std::filesystem::path& path, const std::vector<double>& trace) {
    std::string text = "epoch,train_rmse\n";
    for (std::size_t e = 0; e < trace.size(); ++e)
        text += std::to_string(e + 1) + ',' + format_double(trace[e]) + '\n';
    write_text(path, text);
}

void write_generation_trace_csv(const std::filesystem::path& path, const EvolutionReport& report) {
    std::string text = "generation,average_test_rmse\n";
    for (const auto& g : report.generations)
        text += std::to_string(g.generation) + ',' + format_double(g.mean_rmse) + '\n';
    write_text(path, text);
}

void write_summary_files(const std::filesystem::path& dir, const std::vector<SummaryRow>& rows) {
    const MergedReport merged = merge_reports({rows});
    write_merged_csv(merged, dir / "summary.csv");
    write_text(dir / "summary.txt", render_table(merged));
}

std::size_t worst_index(const std::vector<double>& test_rmse) {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < test_rmse.size(); ++i)
        if (test_rmse[i] > test_rmse[worst]) worst = i;
    return worst;
}

NetworkPhenotype random_network(const NetworkShape& shape, Rng& rng) {
    std::uniform_real_distribution<double> weight(-0.3, 0.3);
    std::vector<double> params(shape.param_count());
    for (double& p : params) p = weight(rng);
    return unflatten_params(shape, params);
}

TrainerSpec resolve_spec(const ExperimentConfig& config, TrainerKind kind) {
    TrainerSpec spec = default_spec(kind);
    if (config.trainer_params) {
        spec.params = *config.trainer_params;
        validate_spec(spec);
    }
    return spec;
}

void check_fixed_trainers(const ExperimentConfig& config, const std::string& command) {
    if (config.trainers.evolved)
        throw std::invalid_argument(command + ": requires concrete trainer kinds (BP, SCG, QNA, LM)");
    if (config.trainers.fixed.empty())
        throw std::invalid_argument(command + ": no trainer selected");
}

std::size_t display_width(const std::string& s) {
    std::size_t w = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++w;
    return w;
}

}  // namespace

std::string_view dataset_tag(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::mackey: return "mackey-glass";
        case DatasetKind::gas_furnace: return "gas-furnace";
        case DatasetKind::wastewater: return "wastewater";
    }
    return "?";
}

std::optional<DatasetKind> parse_dataset_tag(std::string_view tag) {
    const std::string t = lower(trim(tag));
    if (t == "mackey" || t == "mackey-glass" || t == "mg") return DatasetKind::mackey;
    if (t == "gas" || t == "gas-furnace" || t == "furnace") return DatasetKind::gas_furnace;
    if (t == "wastewater" || t == "waste") return DatasetKind::wastewater;
    return std::nullopt;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path.string());

    std::map<std::string, std::string> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config file " + path.string() + " line "
                                        + std::to_string(line_no) + ": expected key=value");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config file " + path.string() + " line "
                                        + std::to_string(line_no) + ": empty key");
        entries[key] = value;
    }
    return entries;
}

void apply_config_entry(ExperimentConfig& config, const std::string& key, const std::string& value) {
    if (key == "dataset") {
        const auto kind = parse_dataset_tag(value);
        if (!kind)
            throw std::invalid_argument("config: dataset: '" + value
                                        + "' is not one of mackey, gas-furnace, wastewater");
        config.dataset = *kind;
    } else if (key == "data_file") {
        config.data_file = value;
    } else if (key == "samples") {
        config.samples = parse_count(value, key);
    } else if (key == "dt") {
        config.dt = parse_double(value, "config: dt");
    } else if (key == "tau") {
        config.tau = parse_double(value, "config: tau");
    } else if (key == "x0") {
        config.x0 = parse_double(value, "config: x0");
    } else if (key == "trainer") {
        config.trainers = parse_trainers(value);
    } else if (key == "population_size") {
        config.evolution.population_size = parse_count(value, key);
    } else if (key == "max_generations") {
        config.evolution.max_generations = parse_count(value, key);
    } else if (key == "max_hidden") {
        config.evolution.max_hidden = parse_count(value, key);
    } else if (key == "epochs_per_eval") {
        config.evolution.epochs_per_eval = parse_count(value, key);
    } else if (key == "elitism_fraction") {
        config.evolution.elitism_fraction = parse_double(value, "config: elitism_fraction");
    } else if (key == "selection_fraction") {
        config.evolution.selection_fraction = parse_double(value, "config: selection_fraction");
    } else if (key == "mutation_rate") {
        config.evolution.mutation_rate = parse_double(value, "config: mutation_rate");
    } else if (key == "fitness_split") {
        const auto split = parse_fitness_split_tag(lower(value));
        if (!split)
            throw std::invalid_argument("config: fitness_split: '" + value
                                        + "' is not 'test' or 'holdout'");
        config.evolution.fitness_split = *split;
    } else if (key == "target_rmse") {
        config.evolution.target_rmse = parse_double(value, "config: target_rmse");
    } else if (key == "seed") {
        config.evolution.seed = parse_u64(value, key);
    } else if (key == "lamarckian") {
        config.evolution.lamarckian = parse_bool(value, key);
    } else if (key == "eval_threads") {
        config.evolution.eval_threads = parse_count(value, key);
    } else if (key == "repetitions") {
        config.repetitions = parse_count(value, key);
        if (config.repetitions < 1)
            throw std::invalid_argument("config: repetitions must be >= 1");
    } else if (key == "output_dir") {
        config.output_dir = value;
    } else if (key == "architecture") {
        config.architecture = value;
    } else if (key == "baseline_epochs") {
        config.baseline_epochs = parse_count(value, key);
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

PreparedData prepare_data(const ExperimentConfig& config) {
    SupervisedDataset ds;
    switch (config.dataset) {
        case DatasetKind::mackey:
            if (!config.data_file.empty()) {
                ds = load_dataset(config.data_file);
            } else {
                ds = embed_mackey(mackey_glass_generate(config.samples, config.dt, config.tau,
                                                        config.x0));
            }
            break;
        case DatasetKind::gas_furnace:
            ds = load_gas_furnace(config.data_file.empty() ? "data/gas_furnace.csv"
                                                           : config.data_file);
            break;
        case DatasetKind::wastewater:
            if (config.data_file.empty())
                throw std::invalid_argument(
                    "wastewater: no data file configured. The recorded plant influent series is "
                    "distributed with its original study; pass it (or a stand-in from "
                    "`gen-data --dataset wastewater`) via --data-file.");
            ds = load_wastewater(config.data_file);
            break;
    }
    if (!ds.normalization) ds = normalize(ds);

    PreparedData data;
    data.full_train = train_batch(ds);
    data.test = test_batch(ds);
    if (config.evolution.fitness_split == FitnessSplit::holdout) {
        auto [head, tail] = carve_holdout(ds);
        data.train = std::move(head);
        data.fitness = std::move(tail);
    } else {
        data.train = data.full_train;
        data.fitness = data.test;
    }
    data.dataset = std::move(ds);
    return data;
}

std::vector<SummaryRow> run_evolve(const ExperimentConfig& config) {
    if (config.repetitions < 1) throw std::invalid_argument("evolve: repetitions must be >= 1");
    const PreparedData data = prepare_data(config);
    const std::filesystem::path dir = config.output_dir;
    ensure_dir(dir);
    write_text(dir / "config.json", config_snapshot(config, "evolve").dump(2) + "\n");
    std::cout << "seed=" << config.evolution.seed << "\n";

    struct Run {
        std::string tag;
        std::optional<TrainerKind> kind;
    };
    std::vector<Run> runs;
    if (config.trainers.evolved) {
        runs.push_back({"evolved", std::nullopt});
    } else {
        check_fixed_trainers(config, "evolve");
        for (auto k : config.trainers.fixed) runs.push_back({std::string(trainer_tag(k)), k});
    }

    std::vector<SummaryRow> rows;
    for (const auto& run : runs) {
        ensure_dir(dir / run.tag);
        std::vector<double> rep_train, rep_test;
        std::vector<EvolutionReport> reports;
        for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
            EvolutionConfig cfg = config.evolution;
            cfg.algorithm_mode = run.kind;
            cfg.seed = derive_seed(config.evolution.seed, rep);
            EvolutionReport report = evolve(data.train, data.fitness, cfg);

            const auto& net = *report.best.trained_phenotype;
            rep_train.push_back(rmse(net, data.full_train));
            rep_test.push_back(rmse(net, data.test));

            const std::string stem = "rep" + std::to_string(rep);
            write_text(dir / run.tag / (stem + ".report.json"), report_to_json(report) + "\n");
            write_generation_trace_csv(dir / run.tag / (stem + ".trace.csv"), report);
            reports.push_back(std::move(report));
        }

        const std::size_t reported = worst_index(rep_test);
        const auto& best = reports[reported].best;
        write_text(dir / run.tag / "best_genome.json", genome_to_json(best.genome) + "\n");
        write_predictions_csv(dir / run.tag / "predictions.csv", *best.trained_phenotype,
                              data.test, *data.dataset.normalization);

        rows.push_back({data.dataset.name, "evolve", run.tag, rep_train[reported],
                        rep_test[reported], architecture_summary(*best.trained_phenotype),
                        config.evolution.seed});
        std::cout << data.dataset.name << " evolve " << run.tag << ": worst-of-"
                  << config.repetitions << " test RMSE " << format_double(rep_test[reported])
                  << " (" << rows.back().architecture << ")\n";
    }

    write_summary_files(dir, rows);
    return rows;
}

std::vector<SummaryRow> run_baseline(const ExperimentConfig& config) {
    if (config.repetitions < 1) throw std::invalid_argument("baseline: repetitions must be >= 1");
    check_fixed_trainers(config, "baseline");
    const PreparedData data = prepare_data(config);
    const NetworkShape shape{data.dataset.inputs.cols(),
                             parse_architecture(config.architecture)};

    const std::filesystem::path dir = config.output_dir;
    ensure_dir(dir);
    write_text(dir / "config.json", config_snapshot(config, "baseline").dump(2) + "\n");
    std::cout << "seed=" << config.evolution.seed << "\n";

    std::vector<SummaryRow> rows;
    for (const auto kind : config.trainers.fixed) {
        const std::string tag(trainer_tag(kind));
        ensure_dir(dir / tag);
        const TrainerSpec spec = resolve_spec(config, kind);

        std::vector<double> rep_train, rep_test;
        std::vector<NetworkPhenotype> nets;
        for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
            Rng rng(derive_seed(config.evolution.seed, rep));
            NetworkPhenotype net = random_network(shape, rng);
            const TrainingResult result = train(net, data.full_train, spec, config.baseline_epochs);
            net = unflatten_params(shape, result.final_params);

            rep_train.push_back(rmse(net, data.full_train));
            rep_test.push_back(rmse(net, data.test));
            write_epoch_trace_csv(dir / tag / ("rep" + std::to_string(rep) + ".trace.csv"),
                                  result.epoch_rmse);
            nets.push_back(std::move(net));
        }

        const std::size_t reported = worst_index(rep_test);
        write_text(dir / tag / "network.json", phenotype_to_json(nets[reported]) + "\n");
        write_predictions_csv(dir / tag / "predictions.csv", nets[reported], data.test,
                              *data.dataset.normalization);

        rows.push_back({data.dataset.name, "baseline", tag, rep_train[reported],
                        rep_test[reported], architecture_summary(shape), config.evolution.seed});
        std::cout << data.dataset.name << " baseline " << tag << ": worst-of-"
                  << config.repetitions << " test RMSE " << format_double(rep_test[reported])
                  << " (" << rows.back().architecture << ", " << config.baseline_epochs
                  << " epochs)\n";
    }

    write_summary_files(dir, rows);
    return rows;
}

std::vector<SummaryRow> run_train(const ExperimentConfig& config) {
    check_fixed_trainers(config, "train");
    if (config.trainers.fixed.size() != 1)
        throw std::invalid_argument("train: exactly one trainer must be selected");
    const TrainerKind kind = config.trainers.fixed.front();
    const PreparedData data = prepare_data(config);
    const NetworkShape shape{data.dataset.inputs.cols(),
                             parse_architecture(config.architecture)};

    const std::filesystem::path dir = config.output_dir;
    ensure_dir(dir);
    write_text(dir / "config.json", config_snapshot(config, "train").dump(2) + "\n");
    std::cout << "seed=" << config.evolution.seed << "\n";

    Rng rng(derive_seed(config.evolution.seed, 0));
    NetworkPhenotype net = random_network(shape, rng);
    const TrainerSpec spec = resolve_spec(config, kind);
    const TrainingResult result =
        train(net, data.full_train, spec, config.evolution.epochs_per_eval);
    net = unflatten_params(shape, result.final_params);

    write_epoch_trace_csv(dir / "trace.csv", result.epoch_rmse);
    write_text(dir / "network.json", phenotype_to_json(net) + "\n");
    write_predictions_csv(dir / "predictions.csv", net, data.test, *data.dataset.normalization);

    std::vector<SummaryRow> rows{{data.dataset.name, "train", std::string(trainer_tag(kind)),
                                  rmse(net, data.full_train), rmse(net, data.test),
                                  architecture_summary(shape), config.evolution.seed}};
    write_summary_files(dir, rows);
    std::cout << data.dataset.name << " train " << trainer_tag(kind) << ": "
              << result.epochs_used << " epochs (" << termination_tag(result.termination)
              << "), train RMSE " << format_double(rows[0].train_rmse) << ", test RMSE "
              << format_double(rows[0].test_rmse) << "\n";
    return rows;
}

void run_gen_data(const ExperimentConfig& config, const std::filesystem::path& out_csv) {
    if (out_csv.has_parent_path()) ensure_dir(out_csv.parent_path());
    switch (config.dataset) {
        case DatasetKind::mackey: {
            const auto ds =
                embed_mackey(mackey_glass_generate(config.samples, config.dt, config.tau, config.x0));
            save_dataset(ds, out_csv);
            std::cout << ds.name << ": " << ds.pattern_count() << " patterns, train split "
                      << ds.split_index << " -> " << out_csv.string() << " (+ .json sidecar)\n";
            break;
        }
        case DatasetKind::gas_furnace: {
            const auto ds = load_gas_furnace(config.data_file.empty() ? "data/gas_furnace.csv"
                                                                      : config.data_file);
            save_dataset(ds, out_csv);
            std::cout << ds.name << ": " << ds.pattern_count() << " patterns, train split "
                      << ds.split_index << " -> " << out_csv.string() << " (+ .json sidecar)\n";
            break;
        }
        case DatasetKind::wastewater: {
            if (!config.data_file.empty()) {
                const auto ds = load_wastewater(config.data_file);
                save_dataset(ds, out_csv);
                std::cout << ds.name << ": " << ds.pattern_count() << " patterns, train split "
                          << ds.split_index << " -> " << out_csv.string() << " (+ .json sidecar)\n";
                break;
            }
            const RawSeries series = synthetic_wastewater_series(config.samples,
                                                                 config.evolution.seed);
            Matrix column(series.values.size(), 1);
            for (std::size_t i = 0; i < series.values.size(); ++i) column(i, 0) = series.values[i];
            write_csv(out_csv, {}, column);
            std::cout << "synthetic stand-in flow series (NOT the recorded plant data): "
                      << series.values.size() << " values -> " << out_csv.string()
                      << "; feed it back via --dataset wastewater --data-file\n";
            break;
        }
    }
}

std::vector<SummaryRow> load_summary(const std::filesystem::path& path) {
    std::filesystem::path file = path;
    if (std::filesystem::is_directory(path)) file = path / "summary.csv";
    if (!std::filesystem::exists(file))
        throw std::invalid_argument("no summary at " + file.string());

    const auto rows = read_csv_rows(file);
    if (rows.empty()) throw std::invalid_argument(file.string() + ": empty summary");

    std::size_t begin = 0;
    if (!rows[0].empty() && rows[0][0] == "dataset") begin = 1;
    std::vector<SummaryRow> out;
    for (std::size_t r = begin; r < rows.size(); ++r) {
        const auto& cells = rows[r];
        if (cells.size() < 7)
            throw std::invalid_argument(file.string() + " row " + std::to_string(r + 1)
                                        + ": expected at least 7 columns, got "
                                        + std::to_string(cells.size()));
        SummaryRow row;
        row.dataset = cells[0];
        row.mode = cells[1];
        row.trainer = cells[2];
        row.train_rmse = parse_double(cells[3], file.string() + ": train_rmse");
        row.test_rmse = parse_double(cells[4], file.string() + ": test_rmse");
        row.architecture = cells[5];
        row.seed = parse_u64(cells[6], "seed");
        out.push_back(std::move(row));
    }
    return out;
}

MergedReport merge_reports(const std::vector<std::vector<SummaryRow>>& sources) {
    MergedReport merged;
    for (const auto& rows : sources)
        merged.rows.insert(merged.rows.end(), rows.begin(), rows.end());

    std::vector<std::string> seen;
    for (const auto& row : merged.rows) {
        if (std::find(seen.begin(), seen.end(), row.dataset) != seen.end()) continue;
        seen.push_back(row.dataset);
        std::size_t best = merged.rows.size();
        for (std::size_t i = 0; i < merged.rows.size(); ++i) {
            if (merged.rows[i].dataset != row.dataset) continue;
            if (best == merged.rows.size() || merged.rows[i].test_rmse < merged.rows[best].test_rmse)
                best = i;
        }
        merged.best_per_dataset.push_back(best);
    }
    return merged;
}

std::string render_table(const MergedReport& merged) {
    const std::vector<std::string> headers{"Dataset", "Mode",        "Trainer",
                                           "Train RMSE", "Test RMSE", "Architecture"};
    std::vector<std::vector<std::string>> cells;
    for (std::size_t i = 0; i < merged.rows.size(); ++i) {
        const auto& r = merged.rows[i];
        const bool best = std::find(merged.best_per_dataset.begin(), merged.best_per_dataset.end(),
                                    i) != merged.best_per_dataset.end();
        cells.push_back({r.dataset, r.mode, r.trainer, format_double(r.train_rmse),
                         std::string(best ? "†" : "") + format_double(r.test_rmse),
                         r.architecture});
    }

    std::vector<std::size_t> width(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c) {
        width[c] = display_width(headers[c]);
        for (const auto& row : cells) width[c] = std::max(width[c], display_width(row[c]));
    }

    auto line = [&](const std::vector<std::string>& row) {
        std::string out;
        for (std::size_t c = 0; c < row.size(); ++c) {
            out += row[c];
            if (c + 1 < row.size())
                out += std::string(width[c] - display_width(row[c]) + 2, ' ');
        }
        out += '\n';
        return out;
    };

    std::string text = line(headers);
    std::size_t rule = 0;
    for (std::size_t c = 0; c < width.size(); ++c) rule += width[c] + (c + 1 < width.size() ? 2 : 0);
    text += std::string(rule, '-') + '\n';
    for (const auto& row : cells) text += line(row);
    return text;
}

void write_merged_csv(const MergedReport& merged, const std::filesystem::path& path) {
    std::string text = "dataset,mode,trainer,train_rmse,test_rmse,architecture,seed,best\n";
    for (std::size_t i = 0; i < merged.rows.size(); ++i) {
        const auto& r = merged.rows[i];
        const bool best = std::find(merged.best_per_dataset.begin(), merged.best_per_dataset.end(),
                                    i) != merged.best_per_dataset.end();
        text += csv_escape(r.dataset) + ',' + csv_escape(r.mode) + ',' + csv_escape(r.trainer) + ','
                + format_double(r.train_rmse) + ',' + format_double(r.test_rmse) + ','
                + csv_escape(r.architecture) + ',' + std::to_string(r.seed) + ','
                + (best ? "1" : "0") + '\n';
    }
    write_text(path, text);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        any = true;
    };
    auto end_row = [&] {
        if (any || !row.empty()) {
            end_field();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
            field.clear();
        }
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            end_row();
        } else if (c != '\r') {
            field += c;
            any = true;
        }
    }
    if (quoted) throw std::invalid_argument(path.string() + ": unterminated quoted field");
    if (any || !field.empty() || !row.empty()) end_row();
    return rows;
}

}  // namespace eann::harness
