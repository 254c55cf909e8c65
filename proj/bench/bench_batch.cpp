// Serial reference vs OpenMP batch kernels: FEM batch evaluation and
// surrogate batch prediction.

#include "solo/core/rng.hpp"
#include "solo/driver/batch.hpp"
#include "solo/driver/problem.hpp"
#include "solo/nn/mlp.hpp"
#include "solo/sampling/sampling.hpp"

#include <benchmark/benchmark.h>

#include <string>

using namespace solo;

namespace {

const char* const kProblems[] = {"compliance-5", "compliance-11", "truss-72", "truss-432"};

std::vector<DesignVector> designs_for(const driver::Problem& p, std::size_t n)
{
    RngStream rng(1, 0);
    const VolumeConstraint* c = p.volume ? &*p.volume : nullptr;
    return sampling::initial_batch(n, p.dim, p.space, c, rng);
}

template <bool Parallel>
void fem_batch(benchmark::State& state)
{
    const auto p = driver::make_problem(kProblems[state.range(0)]);
    const auto ds = designs_for(p, 64);
    for (auto _ : state) {
        auto r = Parallel ? driver::evaluate_batch(p, ds) : driver::evaluate_batch_serial(p, ds);
        benchmark::DoNotOptimize(r.data());
    }
    state.SetLabel(p.id);
    state.SetItemsProcessed(state.iterations() * static_cast<long>(ds.size()));
}

template <bool Parallel>
void predictor_batch(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    nn::MlpSpec spec;
    spec.input_dim = n;
    spec.hidden = {256, 512, 256};
    RngStream rng(2, 0);
    const nn::Predictor pred(nn::init_network(spec, rng));
    std::vector<std::vector<double>> xs(1024, std::vector<double>(n));
    for (auto& v : xs)
        for (auto& x : v) x = rng.uniform();
    for (auto _ : state) {
        auto r = Parallel ? pred.objective_batch(xs) : pred.objective_batch_serial(xs);
        benchmark::DoNotOptimize(r.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(xs.size()));
}

} // namespace

BENCHMARK(fem_batch<false>)->Name("fem_batch/serial")->DenseRange(0, 3)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(fem_batch<true>)->Name("fem_batch/openmp")->DenseRange(0, 3)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(predictor_batch<false>)->Name("predictor_batch/serial")->Arg(25)->Arg(121)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(predictor_batch<true>)->Name("predictor_batch/openmp")->Arg(25)->Arg(121)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
