#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"

#include "eann/evolution.hpp"
#include "eann/genome.hpp"
#include "eann/network.hpp"
#include "eann/rng.hpp"
#include "eann/serialization.hpp"

namespace {

using namespace eann;

NetworkPhenotype sample_network() {
    NetworkPhenotype net;
    net.n_inputs = 3;
    net.hidden = {
        {Activation::TStar, {0.1 + 0.2, -1.5, 2.25}, 1.0 / 3.0},
        {Activation::L, {1e-300, 0.0, -0.0625}, -7.75},
    };
    net.output_weights = {0.5, -2.0};
    net.output_bias = 0.125;
    return net;
}

EvaluationBatch tiny_batch(std::size_t patterns, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    EvaluationBatch batch;
    batch.inputs = Matrix(patterns, 2);
    batch.targets.resize(patterns);
    for (std::size_t p = 0; p < patterns; ++p) {
        batch.inputs(p, 0) = unit(rng);
        batch.inputs(p, 1) = unit(rng);
        batch.targets[p] = 0.5 + 0.25 * std::sin(batch.inputs(p, 0) + batch.inputs(p, 1));
    }
    return batch;
}

}  // namespace

TEST_CASE("genomes survive the JSON round trip bit-exactly") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(derive_seed(42, seed));
        const Genome g = random_genome(rng, 1 + seed % 6, 1 + (seed * 7) % 32);
        const Genome back = genome_from_json(genome_to_json(g));
        CHECK(back == g);
    }
}

TEST_CASE("genome JSON carries the envelope alongside the bits") {
    const Genome g = zero_genome(4, 16);
    const std::string text = genome_to_json(g);
    CHECK(text.find("\"n_inputs\":4") != std::string::npos);
    CHECK(text.find("\"max_hidden\":16") != std::string::npos);
    CHECK(text.find("\"bits\"") != std::string::npos);
}

TEST_CASE("genome JSON rejects damage") {
    CHECK_THROWS_WITH_AS(genome_from_json("{"), doctest::Contains("malformed JSON"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(genome_from_json("{\"n_inputs\": 4}"),
                         doctest::Contains("genome_from_json"), std::invalid_argument);
    CHECK_THROWS_AS(
        genome_from_json("{\"n_inputs\": 4, \"max_hidden\": 16, \"bits\": \"zz\"}"),
        std::invalid_argument);
    // Numbers where a string is expected are schema damage, not a crash.
    CHECK_THROWS_AS(genome_from_json("{\"n_inputs\": 4, \"max_hidden\": 16, \"bits\": 7}"),
                    std::invalid_argument);
}

TEST_CASE("phenotypes survive the JSON round trip bit-exactly") {
    const auto net = sample_network();
    CHECK(phenotype_from_json(phenotype_to_json(net)) == net);

    // Random nets with every activation in play.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> w(-3.0, 3.0);
    for (int trial = 0; trial < 10; ++trial) {
        NetworkPhenotype r;
        r.n_inputs = 1 + trial % 4;
        const std::size_t h = 1 + trial % 5;
        for (std::size_t i = 0; i < h; ++i) {
            HiddenNeuron neuron;
            neuron.activation = static_cast<Activation>(trial % 5);
            neuron.weights.resize(r.n_inputs);
            for (double& v : neuron.weights) v = w(rng);
            neuron.bias = w(rng);
            r.hidden.push_back(std::move(neuron));
        }
        r.output_weights.resize(h);
        for (double& v : r.output_weights) v = w(rng);
        r.output_bias = w(rng);
        CHECK(phenotype_from_json(phenotype_to_json(r)) == r);
    }
}

TEST_CASE("phenotype JSON rejects unknown tags and broken shapes") {
    const std::string good = phenotype_to_json(sample_network());

    std::string bad_tag = good;
    const auto pos = bad_tag.find("\"T*\"");
    REQUIRE(pos != std::string::npos);
    bad_tag.replace(pos, 4, "\"Q\"");
    CHECK_THROWS_WITH_AS(phenotype_from_json(bad_tag),
                         doctest::Contains("unknown activation tag 'Q'"), std::invalid_argument);

    CHECK_THROWS_WITH_AS(phenotype_from_json("not json at all"),
                         doctest::Contains("malformed JSON"), std::invalid_argument);
    CHECK_THROWS_AS(phenotype_from_json("{\"n_inputs\": 2}"), std::invalid_argument);

    // Structurally valid JSON describing an invalid network still fails.
    CHECK_THROWS_AS(phenotype_from_json(
                        "{\"n_inputs\": 2, \"hidden\": [], \"output_weights\": [],"
                        " \"output_bias\": 0.0}"),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        phenotype_from_json("{\"n_inputs\": 2, \"hidden\":"
                            " [{\"activation\": \"T\", \"weights\": [1.0], \"bias\": 0.0}],"
                            " \"output_weights\": [1.0], \"output_bias\": 0.0}"),
        std::invalid_argument);
}

TEST_CASE("reports survive the JSON round trip bit-exactly") {
    EvolutionConfig cfg;
    cfg.population_size = 4;
    cfg.max_generations = 2;
    cfg.max_hidden = 3;
    cfg.epochs_per_eval = 4;
    cfg.seed = 17;
    const auto report = evolve(tiny_batch(10, 1), tiny_batch(5, 2), cfg);
    REQUIRE(report.generations.size() == 2);

    const auto back = report_from_json(report_to_json(report));
    CHECK(back == report);
    CHECK(back.config == report.config);
    CHECK(back.best.fitness == report.best.fitness);
    CHECK(back.best.trained_phenotype == report.best.trained_phenotype);
    CHECK(back.predictions == report.predictions);
}

TEST_CASE("optional report fields round trip as nulls") {
    EvolutionConfig cfg;
    cfg.population_size = 2;
    cfg.max_generations = 1;
    cfg.max_hidden = 2;
    cfg.epochs_per_eval = 1;
    cfg.algorithm_mode = TrainerKind::QNA;
    cfg.target_rmse = 0.125;
    cfg.lamarckian = false;
    cfg.fitness_split = FitnessSplit::holdout;
    cfg.eval_threads = 3;
    auto report = evolve(tiny_batch(8, 3), tiny_batch(4, 4), cfg);

    // Strip the optionals to exercise the null branches.
    report.best.fitness.reset();
    report.best.trained_phenotype.reset();
    auto back = report_from_json(report_to_json(report));
    CHECK(back == report);
    CHECK_FALSE(back.best.fitness.has_value());
    CHECK_FALSE(back.best.trained_phenotype.has_value());
    CHECK(back.config.algorithm_mode == TrainerKind::QNA);
    CHECK(back.config.target_rmse == 0.125);
    CHECK(back.config.fitness_split == FitnessSplit::holdout);
    CHECK(back.config.eval_threads == 3);
    CHECK_FALSE(back.config.lamarckian);
}

TEST_CASE("report JSON rejects damage with a clear source") {
    CHECK_THROWS_WITH_AS(report_from_json("[[["), doctest::Contains("report_from_json"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(report_from_json("{}"), doctest::Contains("report_from_json"),
                         std::invalid_argument);

    EvolutionConfig cfg;
    cfg.population_size = 2;
    cfg.max_generations = 1;
    cfg.max_hidden = 2;
    cfg.epochs_per_eval = 0;
    const auto report = evolve(tiny_batch(8, 5), tiny_batch(4, 6), cfg);
    std::string text = report_to_json(report);

    SUBCASE("unknown fitness split") {
        const std::string needle = "\"fitness_split\": \"test\"";
        const auto pos = text.find(needle);
        REQUIRE(pos != std::string::npos);
        text.replace(pos, needle.size(), "\"fitness_split\": \"oops\"");
        CHECK_THROWS_WITH_AS(report_from_json(text),
                             doctest::Contains("unknown fitness_split 'oops'"),
                             std::invalid_argument);
    }
    SUBCASE("histogram of the wrong width") {
        const auto pos = text.find("\"trainer_kind_histogram\"");
        REQUIRE(pos != std::string::npos);
        const auto open = text.find('[', pos);
        const auto close = text.find(']', open);
        text.replace(open, close - open + 1, "[1, 1]");
        CHECK_THROWS_WITH_AS(report_from_json(text), doctest::Contains("4 entries"),
                             std::invalid_argument);
    }
    SUBCASE("config field of the wrong type") {
        const std::string needle = "\"population_size\": 2";
        const auto pos = text.find(needle);
        REQUIRE(pos != std::string::npos);
        text.replace(pos, needle.size(), "\"population_size\": \"two\"");
        CHECK_THROWS_WITH_AS(report_from_json(text), doctest::Contains("report_from_json"),
                             std::invalid_argument);
    }
}
