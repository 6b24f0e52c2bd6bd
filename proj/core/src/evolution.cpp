#include "eann/evolution.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "eann/objective.hpp"

namespace eann {

namespace {

std::size_t ceil_fraction(double fraction, std::size_t n) {
    return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
}

// Runs fn(0..count) on up to `threads` workers, claiming indices from a
// shared counter. Output slots are indexed, so scheduling order is invisible.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max<unsigned>(std::thread::hardware_concurrency(), 1);
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        workers.emplace_back([&, t] {
            try {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

bool better(const std::vector<Individual>& pop, std::size_t a, std::size_t b) {
    if (*pop[a].fitness != *pop[b].fitness) return *pop[a].fitness < *pop[b].fitness;
    if (pop[a].genome.bits != pop[b].genome.bits) return pop[a].genome.bits < pop[b].genome.bits;
    return a < b;
}

}  // namespace

std::string_view fitness_split_tag(FitnessSplit split) {
    return split == FitnessSplit::test ? "test" : "holdout";
}

std::optional<FitnessSplit> parse_fitness_split_tag(std::string_view tag) {
    if (tag == "test") return FitnessSplit::test;
    if (tag == "holdout") return FitnessSplit::holdout;
    return std::nullopt;
}

void validate_config(const EvolutionConfig& config) {
    if (config.population_size < 2)
        throw std::invalid_argument("evolution config: population_size must be >= 2");
    if (config.max_generations < 1)
        throw std::invalid_argument("evolution config: max_generations must be >= 1");
    if (config.max_hidden < 1 || config.max_hidden > 32)
        throw std::invalid_argument("evolution config: max_hidden must be in [1, 32]");
    if (!(config.elitism_fraction > 0.0 && config.elitism_fraction <= 1.0))
        throw std::invalid_argument("evolution config: elitism_fraction must be in (0, 1]");
    if (!(config.selection_fraction > 0.0 && config.selection_fraction <= 1.0))
        throw std::invalid_argument("evolution config: selection_fraction must be in (0, 1]");
    if (!(config.mutation_rate >= 0.0 && config.mutation_rate <= 1.0))
        throw std::invalid_argument("evolution config: mutation_rate must be in [0, 1]");
    if (config.target_rmse && !(*config.target_rmse >= 0.0))
        throw std::invalid_argument("evolution config: target_rmse must be >= 0");
}

std::size_t elite_count(const EvolutionConfig& config) {
    return std::min(ceil_fraction(config.elitism_fraction, config.population_size),
                    config.population_size);
}

std::size_t parent_pool_size(const EvolutionConfig& config) {
    return std::min(ceil_fraction(config.selection_fraction, config.population_size),
                    config.population_size);
}

Individual evaluate(Individual individual, const EvaluationBatch& train_batch,
                    const EvaluationBatch& fitness_batch, const EvolutionConfig& config) {
    DecodedGenome decoded = decode(individual.genome);
    TrainerSpec spec = config.algorithm_mode
        ? decode_trainer_spec(individual.genome, *config.algorithm_mode)
        : decoded.trainer;

    TrainingResult trained =
        train(decoded.phenotype, train_batch, spec, config.epochs_per_eval);

    NetworkPhenotype net = unflatten_params(shape_of(decoded.phenotype), trained.final_params);

    double fit;
    try {
        fit = rmse(net, fitness_batch);
    } catch (const numerical_error&) {
        fit = std::numeric_limits<double>::max();
    }

    individual.fitness = fit;
    individual.trained_phenotype = net;
    individual.weight_clamps = config.lamarckian ? write_trained_weights(individual.genome, net) : 0;
    return individual;
}

std::vector<std::size_t> population_order(const std::vector<Individual>& population) {
    if (population.empty()) throw std::invalid_argument("population_order: empty population");
    for (const auto& ind : population)
        if (!ind.fitness) throw std::invalid_argument("population_order: unevaluated individual");
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return better(population, a, b); });
    return order;
}

std::vector<std::size_t> select_parent_pool(const std::vector<Individual>& population,
                                            const EvolutionConfig& config) {
    auto order = population_order(population);
    const std::size_t pool = std::min(parent_pool_size(config), order.size());
    order.resize(pool);
    return order;
}

std::vector<std::size_t> select_parents(const std::vector<Individual>& population,
                                        const EvolutionConfig& config, Rng& rng,
                                        std::size_t count) {
    const auto pool = select_parent_pool(population, config);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::vector<std::size_t> parents(count);
    for (auto& p : parents) p = pool[pick(rng)];
    return parents;
}

std::vector<std::size_t> select_parents(const std::vector<Individual>& population,
                                        const EvolutionConfig& config, Rng& rng) {
    return select_parents(population, config, rng,
                          config.population_size - elite_count(config));
}

EvolutionReport evolve(const EvaluationBatch& train_batch, const EvaluationBatch& fitness_batch,
                       const EvolutionConfig& config) {
    validate_config(config);
    auto check_batch = [](const EvaluationBatch& batch, const char* which) {
        if (batch.inputs.rows() == 0 || batch.inputs.cols() == 0)
            throw std::invalid_argument(std::string("evolve: ") + which + " batch is empty");
        if (batch.targets.size() != batch.inputs.rows())
            throw std::invalid_argument(std::string("evolve: ") + which
                                        + " batch target count does not match pattern count");
    };
    check_batch(train_batch, "train");
    check_batch(fitness_batch, "fitness");
    if (train_batch.inputs.cols() != fitness_batch.inputs.cols())
        throw std::invalid_argument("evolve: train and fitness batches have different input widths");

    const std::size_t n_inputs = train_batch.inputs.cols();
    const std::size_t pop_size = config.population_size;
    const std::size_t elites = elite_count(config);

    EvolutionReport report;
    report.config = config;

    std::vector<Individual> population(pop_size);
    std::vector<std::uint8_t> fresh(pop_size, 1);
    for (std::size_t i = 0; i < pop_size; ++i) {
        Rng stream(derive_seed(config.seed, 0, i));
        population[i].genome = random_genome(stream, n_inputs, config.max_hidden);
    }

    for (std::size_t gen = 0; gen < config.max_generations; ++gen) {
        parallel_for(pop_size, config.eval_threads, [&](std::size_t i) {
            if (!population[i].fitness)
                population[i] = evaluate(std::move(population[i]), train_batch, fitness_batch, config);
        });

        const auto order = population_order(population);
        const Individual& gen_best = population[order.front()];

        GenerationStats stats;
        stats.generation = gen;
        stats.best_rmse = *gen_best.fitness;
        stats.worst_rmse = *population[order.back()].fitness;
        double sum = 0.0;
        for (std::size_t i = 0; i < pop_size; ++i) {
            const Individual& ind = population[i];
            sum += *ind.fitness;
            const TrainerKind kind = config.algorithm_mode
                ? *config.algorithm_mode
                : static_cast<TrainerKind>(read_gene(ind.genome, 0, kAlgBits));
            stats.trainer_kind_histogram[static_cast<std::size_t>(kind)]++;
            if (fresh[i]) stats.weight_clamps += ind.weight_clamps;
        }
        stats.mean_rmse = sum / static_cast<double>(pop_size);
        stats.best_architecture = architecture_summary(gen_best.trained_phenotype
                                                           ? *gen_best.trained_phenotype
                                                           : decode(gen_best.genome).phenotype);
        report.generations.push_back(std::move(stats));
        report.best_genomes.push_back(gen_best.genome);

        const bool hit_target = config.target_rmse && *gen_best.fitness <= *config.target_rmse;
        if (hit_target) report.reached_target = true;
        if (hit_target || gen + 1 == config.max_generations) {
            report.best = gen_best;
            break;
        }

        // Elites carry their cached fitness; the rest of the next population
        // are mutated copies of pool parents. Each offspring slot draws from
        // its own (seed, generation, slot) stream.
        const auto pool = select_parent_pool(population, config);
        std::vector<Individual> next(pop_size);
        for (std::size_t e = 0; e < elites; ++e) next[e] = population[order[e]];
        std::fill(fresh.begin(), fresh.begin() + static_cast<std::ptrdiff_t>(elites), 0);
        std::fill(fresh.begin() + static_cast<std::ptrdiff_t>(elites), fresh.end(), 1);
        for (std::size_t slot = elites; slot < pop_size; ++slot) {
            Rng stream(derive_seed(config.seed, gen + 1, slot));
            std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
            const Individual& parent = population[pool[pick(stream)]];
            next[slot].genome = mutate(parent.genome, config.mutation_rate, stream);
        }
        population = std::move(next);
    }

    if (report.best.trained_phenotype) {
        const auto& net = *report.best.trained_phenotype;
        report.predictions.reserve(fitness_batch.targets.size());
        for (std::size_t p = 0; p < fitness_batch.inputs.rows(); ++p)
            report.predictions.push_back(forward(net, fitness_batch.inputs.row(p)));
        report.targets = fitness_batch.targets;
    }
    return report;
}

}  // namespace eann
