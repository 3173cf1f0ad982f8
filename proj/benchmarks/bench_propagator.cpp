#include <benchmark/benchmark.h>

#include "floquet/propagator.hpp"

using namespace floquet;

namespace {

ValidatedConfig config(int mu_max, int n_max) {
    LatticeConfig l;
    l.phases = {0.0, 2.0 * pi / 3.0, 0.0};
    TruncationConfig t;
    t.mu_max = mu_max;
    t.n_max = n_max;
    t.n_steps = 8 * n_max;
    t.interior_window = 4;
    return validate(l, t);
}

// One recursion step H_F^p -> H_F^{p+1}; args are mu_max and n_max.
void BM_Apply(benchmark::State& state, Contraction how) {
    const ValidatedConfig cfg = config(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const FloquetOperator op(0.05, 0.0, cfg);
    FloquetPowerState s = op.apply(FloquetPowerState::identity(cfg), how);
    for (auto _ : state) benchmark::DoNotOptimize(op.apply(s, how));
}

void BM_ApplyDense(benchmark::State& state) { BM_Apply(state, Contraction::dense); }
void BM_ApplySpectral(benchmark::State& state) { BM_Apply(state, Contraction::spectral); }

void BM_BuildBlocks(benchmark::State& state) {
    const ValidatedConfig cfg = config(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(build_blocks(0.05, cfg));
}

void BM_PeriodPropagator(benchmark::State& state) {
    const ValidatedConfig cfg = config(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const BlockSet blocks = build_blocks(0.05, cfg);
    for (auto _ : state) benchmark::DoNotOptimize(period_propagator(0.0, blocks, cfg));
}

}  // namespace

BENCHMARK(BM_ApplyDense)->Args({16, 8})->Args({32, 16})->Args({48, 24})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApplySpectral)->Args({16, 8})->Args({32, 16})->Args({48, 24})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildBlocks)->Args({16, 8})->Args({32, 16})->Args({48, 24})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PeriodPropagator)->Args({32, 16})->Args({48, 24})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
