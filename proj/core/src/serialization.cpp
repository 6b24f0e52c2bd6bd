#include "eann/serialization.hpp"

#include <stdexcept>

#include "json.hpp"

namespace eann {

namespace {

using nlohmann::json;

json genome_json(const Genome& g) {
    return {{"n_inputs", g.layout.n_inputs},
            {"max_hidden", g.layout.max_hidden},
            {"bits", genome_to_hex(g)}};
}

Genome genome_from(const json& j) {
    GenomeLayout layout{j.at("n_inputs").get<std::size_t>(),
                        j.at("max_hidden").get<std::size_t>()};
    return genome_from_hex(layout, j.at("bits").get<std::string>());
}

json phenotype_json(const NetworkPhenotype& net) {
    json hidden = json::array();
    for (const auto& neuron : net.hidden)
        hidden.push_back({{"activation", std::string(activation_tag(neuron.activation))},
                          {"weights", neuron.weights},
                          {"bias", neuron.bias}});
    return {{"n_inputs", net.n_inputs},
            {"hidden", std::move(hidden)},
            {"output_weights", net.output_weights},
            {"output_bias", net.output_bias}};
}

NetworkPhenotype phenotype_from(const json& j) {
    NetworkPhenotype net;
    net.n_inputs = j.at("n_inputs").get<std::size_t>();
    for (const auto& h : j.at("hidden")) {
        HiddenNeuron neuron;
        const auto tag = h.at("activation").get<std::string>();
        const auto act = parse_activation_tag(tag);
        if (!act) throw std::invalid_argument("phenotype: unknown activation tag '" + tag + "'");
        neuron.activation = *act;
        neuron.weights = h.at("weights").get<std::vector<double>>();
        neuron.bias = h.at("bias").get<double>();
        net.hidden.push_back(std::move(neuron));
    }
    net.output_weights = j.at("output_weights").get<std::vector<double>>();
    net.output_bias = j.at("output_bias").get<double>();
    validate_network(net);
    return net;
}

json spec_json(const TrainerSpec& spec) {
    std::vector<double> params(spec.params.begin(),
                               spec.params.begin() + trainer_param_count(spec.kind));
    return {{"kind", std::string(trainer_tag(spec.kind))}, {"params", std::move(params)}};
}

json config_json(const EvolutionConfig& c) {
    json j{{"population_size", c.population_size},
           {"max_generations", c.max_generations},
           {"max_hidden", c.max_hidden},
           {"epochs_per_eval", c.epochs_per_eval},
           {"elitism_fraction", c.elitism_fraction},
           {"selection_fraction", c.selection_fraction},
           {"mutation_rate", c.mutation_rate},
           {"fitness_split", std::string(fitness_split_tag(c.fitness_split))},
           {"seed", c.seed},
           {"lamarckian", c.lamarckian},
           {"eval_threads", c.eval_threads}};
    j["algorithm_mode"] =
        c.algorithm_mode ? json(std::string(trainer_tag(*c.algorithm_mode))) : json(nullptr);
    j["target_rmse"] = c.target_rmse ? json(*c.target_rmse) : json(nullptr);
    return j;
}

EvolutionConfig config_from(const json& j) {
    EvolutionConfig c;
    c.population_size = j.at("population_size").get<std::size_t>();
    c.max_generations = j.at("max_generations").get<std::size_t>();
    c.max_hidden = j.at("max_hidden").get<std::size_t>();
    c.epochs_per_eval = j.at("epochs_per_eval").get<std::size_t>();
    c.elitism_fraction = j.at("elitism_fraction").get<double>();
    c.selection_fraction = j.at("selection_fraction").get<double>();
    c.mutation_rate = j.at("mutation_rate").get<double>();
    const auto split_tag = j.at("fitness_split").get<std::string>();
    const auto split = parse_fitness_split_tag(split_tag);
    if (!split) throw std::invalid_argument("config: unknown fitness_split '" + split_tag + "'");
    c.fitness_split = *split;
    if (!j.at("algorithm_mode").is_null()) {
        const auto tag = j.at("algorithm_mode").get<std::string>();
        const auto kind = parse_trainer_tag(tag);
        if (!kind) throw std::invalid_argument("config: unknown algorithm_mode '" + tag + "'");
        c.algorithm_mode = kind;
    }
    if (!j.at("target_rmse").is_null()) c.target_rmse = j.at("target_rmse").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.lamarckian = j.at("lamarckian").get<bool>();
    c.eval_threads = j.at("eval_threads").get<std::size_t>();
    return c;
}

json stats_json(const GenerationStats& s) {
    return {{"generation", s.generation},
            {"best_rmse", s.best_rmse},
            {"mean_rmse", s.mean_rmse},
            {"worst_rmse", s.worst_rmse},
            {"best_architecture", s.best_architecture},
            {"trainer_kind_histogram", s.trainer_kind_histogram},
            {"weight_clamps", s.weight_clamps}};
}

GenerationStats stats_from(const json& j) {
    GenerationStats s;
    s.generation = j.at("generation").get<std::size_t>();
    s.best_rmse = j.at("best_rmse").get<double>();
    s.mean_rmse = j.at("mean_rmse").get<double>();
    s.worst_rmse = j.at("worst_rmse").get<double>();
    s.best_architecture = j.at("best_architecture").get<std::string>();
    const auto hist = j.at("trainer_kind_histogram").get<std::vector<std::size_t>>();
    if (hist.size() != s.trainer_kind_histogram.size())
        throw std::invalid_argument("stats: trainer_kind_histogram must have "
                                    + std::to_string(s.trainer_kind_histogram.size()) + " entries");
    std::copy(hist.begin(), hist.end(), s.trainer_kind_histogram.begin());
    s.weight_clamps = j.at("weight_clamps").get<std::size_t>();
    return s;
}

json individual_json(const Individual& ind) {
    json j{{"genome", genome_json(ind.genome)}, {"weight_clamps", ind.weight_clamps}};
    j["fitness"] = ind.fitness ? json(*ind.fitness) : json(nullptr);
    j["trained_phenotype"] =
        ind.trained_phenotype ? phenotype_json(*ind.trained_phenotype) : json(nullptr);
    return j;
}

Individual individual_from(const json& j) {
    Individual ind;
    ind.genome = genome_from(j.at("genome"));
    if (!j.at("fitness").is_null()) ind.fitness = j.at("fitness").get<double>();
    if (!j.at("trained_phenotype").is_null())
        ind.trained_phenotype = phenotype_from(j.at("trained_phenotype"));
    ind.weight_clamps = j.at("weight_clamps").get<std::size_t>();
    return ind;
}

json parse_or_throw(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw std::invalid_argument(std::string(what) + ": malformed JSON");
    return j;
}

template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string(what) + ": " + e.what());
    }
}

}  // namespace

std::string genome_to_json(const Genome& genome) { return genome_json(genome).dump(); }

Genome genome_from_json(const std::string& text) {
    const json j = parse_or_throw(text, "genome_from_json");
    return guarded("genome_from_json", [&] { return genome_from(j); });
}

std::string phenotype_to_json(const NetworkPhenotype& net) {
    return phenotype_json(net).dump();
}

NetworkPhenotype phenotype_from_json(const std::string& text) {
    const json j = parse_or_throw(text, "phenotype_from_json");
    return guarded("phenotype_from_json", [&] { return phenotype_from(j); });
}

std::string report_to_json(const EvolutionReport& report) {
    json j;
    j["config"] = config_json(report.config);
    j["generations"] = json::array();
    for (const auto& s : report.generations) j["generations"].push_back(stats_json(s));
    j["best_genomes"] = json::array();
    for (const auto& g : report.best_genomes) j["best_genomes"].push_back(genome_json(g));
    j["best"] = individual_json(report.best);
    j["predictions"] = report.predictions;
    j["targets"] = report.targets;
    j["reached_target"] = report.reached_target;
    return j.dump(2);
}

EvolutionReport report_from_json(const std::string& text) {
    const json j = parse_or_throw(text, "report_from_json");
    return guarded("report_from_json", [&] {
        EvolutionReport r;
        r.config = config_from(j.at("config"));
        for (const auto& s : j.at("generations")) r.generations.push_back(stats_from(s));
        for (const auto& g : j.at("best_genomes")) r.best_genomes.push_back(genome_from(g));
        r.best = individual_from(j.at("best"));
        r.predictions = j.at("predictions").get<std::vector<double>>();
        r.targets = j.at("targets").get<std::vector<double>>();
        r.reached_target = j.at("reached_target").get<bool>();
        return r;
    });
}

}  // namespace eann
