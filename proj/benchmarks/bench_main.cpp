// Microbenchmarks for the hot paths of an evolution run: the per-pattern
// forward pass, the batch gradient and Jacobian, one epoch of each trainer,
// and the genome codec that wraps every evaluation.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "eann/datasets.hpp"
#include "eann/genome.hpp"
#include "eann/network.hpp"
#include "eann/objective.hpp"
#include "eann/rng.hpp"
#include "eann/trainers.hpp"

namespace {

using namespace eann;

// Benchmark inputs mirror the chaotic-series workload: 4 inputs, 500
// training patterns, mixed transfer functions.
NetworkPhenotype make_net(std::size_t hidden) {
    Rng rng(7);
    std::uniform_real_distribution<double> w(-1.0, 1.0);
    NetworkPhenotype net;
    net.n_inputs = 4;
    for (std::size_t h = 0; h < hidden; ++h) {
        HiddenNeuron neuron;
        neuron.activation = static_cast<Activation>(h % kActivationCount);
        for (std::size_t i = 0; i < net.n_inputs; ++i) neuron.weights.push_back(w(rng));
        neuron.bias = w(rng);
        net.hidden.push_back(std::move(neuron));
        net.output_weights.push_back(w(rng));
    }
    net.output_bias = w(rng);
    return net;
}

const EvaluationBatch& chaotic_train_batch() {
    static const EvaluationBatch batch =
        train_batch(normalize(embed_mackey(mackey_glass_generate(1024))));
    return batch;
}

void BM_Forward(benchmark::State& state) {
    const auto net = make_net(static_cast<std::size_t>(state.range(0)));
    const auto& batch = chaotic_train_batch();
    std::size_t p = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward(net, batch.inputs.row(p)));
        p = (p + 1) % batch.pattern_count();
    }
}
BENCHMARK(BM_Forward)->Arg(4)->Arg(16);

void BM_BatchSse(benchmark::State& state) {
    const auto net = make_net(static_cast<std::size_t>(state.range(0)));
    const auto& batch = chaotic_train_batch();
    for (auto _ : state) benchmark::DoNotOptimize(sse(net, batch));
}
BENCHMARK(BM_BatchSse)->Arg(4)->Arg(16);

void BM_BatchGradient(benchmark::State& state) {
    const auto net = make_net(static_cast<std::size_t>(state.range(0)));
    const auto& batch = chaotic_train_batch();
    for (auto _ : state) benchmark::DoNotOptimize(sse_and_gradient(net, batch));
}
BENCHMARK(BM_BatchGradient)->Arg(4)->Arg(16);

void BM_BatchJacobian(benchmark::State& state) {
    const auto net = make_net(static_cast<std::size_t>(state.range(0)));
    const auto& batch = chaotic_train_batch();
    for (auto _ : state) benchmark::DoNotOptimize(jacobian(net, batch));
}
BENCHMARK(BM_BatchJacobian)->Arg(4)->Arg(16);

// One epoch per iteration, restarted from the same initial weights, so the
// number reflects steady per-epoch cost rather than convergence behavior.
void BM_TrainerEpoch(benchmark::State& state) {
    const auto kind = static_cast<TrainerKind>(state.range(0));
    const auto net = make_net(16);
    const NetworkProblem problem(shape_of(net), chaotic_train_batch());
    const auto w0 = flatten_params(net);
    const auto spec = default_spec(kind);
    for (auto _ : state) benchmark::DoNotOptimize(train(problem, w0, spec, 1));
}
BENCHMARK(BM_TrainerEpoch)
    ->Arg(static_cast<int>(TrainerKind::BP))
    ->Arg(static_cast<int>(TrainerKind::SCG))
    ->Arg(static_cast<int>(TrainerKind::QNA))
    ->Arg(static_cast<int>(TrainerKind::LM));

void BM_DecodeGenome(benchmark::State& state) {
    Rng rng(11);
    const Genome g = random_genome(rng, 4, 16);
    for (auto _ : state) benchmark::DoNotOptimize(decode(g));
}
BENCHMARK(BM_DecodeGenome);

void BM_EncodeGenome(benchmark::State& state) {
    Rng rng(12);
    const Genome g = random_genome(rng, 4, 16);
    const DecodedGenome d = decode(g);
    for (auto _ : state) benchmark::DoNotOptimize(encode(d, g));
}
BENCHMARK(BM_EncodeGenome);

void BM_MutateGenome(benchmark::State& state) {
    Rng rng(13);
    const Genome g = random_genome(rng, 4, 16);
    for (auto _ : state) benchmark::DoNotOptimize(mutate(g, 0.4, rng));
}
BENCHMARK(BM_MutateGenome);

void BM_ChaoticSeriesGenerate(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(mackey_glass_generate(1024));
}
BENCHMARK(BM_ChaoticSeriesGenerate);

}  // namespace

BENCHMARK_MAIN();
