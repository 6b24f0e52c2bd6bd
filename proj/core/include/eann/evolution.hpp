#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eann/genome.hpp"
#include "eann/network.hpp"
#include "eann/rng.hpp"
#include "eann/trainers.hpp"

namespace eann {

// Which batch supplies the fitness signal. `test` scores candidates on the
// test split; `holdout` scores them on the tail of the training split so the
// test split stays untouched during the search.
enum class FitnessSplit { test, holdout };

std::string_view fitness_split_tag(FitnessSplit split);
std::optional<FitnessSplit> parse_fitness_split_tag(std::string_view tag);

struct EvolutionConfig {
    std::size_t population_size = 40;
    std::size_t max_generations = 40;
    std::size_t max_hidden = 16;
    std::size_t epochs_per_eval = 500;
    double elitism_fraction = 0.05;
    double selection_fraction = 0.50;
    double mutation_rate = 0.40;
    FitnessSplit fitness_split = FitnessSplit::test;
    // Training algorithm: a fixed kind, or empty to let the genome choose.
    std::optional<TrainerKind> algorithm_mode;
    std::optional<double> target_rmse;
    std::uint64_t seed = 1;
    // Write trained weights back into the genome (clamped to the gene range)
    // so offspring inherit them; false keeps genomes as drawn.
    bool lamarckian = true;
    // Worker threads for fitness evaluation; 0 picks the hardware count.
    // Results are identical for any value.
    std::size_t eval_threads = 1;

    bool operator==(const EvolutionConfig&) const = default;
};

void validate_config(const EvolutionConfig& config);

// Ceiling rules, e.g. 5% of 40 keeps 2 elites.
std::size_t elite_count(const EvolutionConfig& config);
std::size_t parent_pool_size(const EvolutionConfig& config);

struct Individual {
    Genome genome;
    std::optional<double> fitness;  // RMSE on the fitness batch, lower is better
    std::optional<NetworkPhenotype> trained_phenotype;
    std::size_t weight_clamps = 0;  // genes clamped during the last write-back

    bool operator==(const Individual&) const = default;
};

struct GenerationStats {
    std::size_t generation = 0;
    double best_rmse = 0.0;
    double mean_rmse = 0.0;
    double worst_rmse = 0.0;
    std::string best_architecture;
    std::array<std::size_t, kTrainerKindCount> trainer_kind_histogram{};
    std::size_t weight_clamps = 0;  // clamp events among this generation's fresh evaluations

    bool operator==(const GenerationStats&) const = default;
};

struct EvolutionReport {
    EvolutionConfig config;
    std::vector<GenerationStats> generations;
    std::vector<Genome> best_genomes;  // best-of-generation snapshots
    Individual best;                   // best individual of the final generation
    std::vector<double> predictions;   // best phenotype applied to the fitness batch
    std::vector<double> targets;       // fitness batch targets, for plotting
    bool reached_target = false;

    bool operator==(const EvolutionReport&) const = default;
};

// Decodes, trains for config.epochs_per_eval epochs, scores RMSE on
// fitness_batch, and (when config.lamarckian) writes the trained weights
// back into the genome. Pure: consumes no randomness.
Individual evaluate(Individual individual, const EvaluationBatch& train_batch,
                    const EvaluationBatch& fitness_batch, const EvolutionConfig& config);

// Indices of the whole population ordered best-first: ascending fitness,
// ties by genome bit order then position. All fitnesses must be present.
std::vector<std::size_t> population_order(const std::vector<Individual>& population);

// First parent_pool_size(config) entries of population_order.
std::vector<std::size_t> select_parent_pool(const std::vector<Individual>& population,
                                            const EvolutionConfig& config);

// Draws `count` parents uniformly from the pool. The two-argument form draws
// one offspring slot per non-elite position.
std::vector<std::size_t> select_parents(const std::vector<Individual>& population,
                                        const EvolutionConfig& config, Rng& rng,
                                        std::size_t count);
std::vector<std::size_t> select_parents(const std::vector<Individual>& population,
                                        const EvolutionConfig& config, Rng& rng);

// Full generation loop: random init, parallel evaluation, elitist refill by
// mutated parents, until max_generations or target_rmse. All randomness is
// derived from config.seed via per-(generation, slot) streams, so reports
// are bit-identical across runs and thread counts.
EvolutionReport evolve(const EvaluationBatch& train_batch, const EvaluationBatch& fitness_batch,
                       const EvolutionConfig& config);

}  // namespace eann
