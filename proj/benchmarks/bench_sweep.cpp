#include <benchmark/benchmark.h>

#include "floquet/modes.hpp"
#include "floquet/observables.hpp"
#include "floquet/propagator.hpp"

using namespace floquet;

namespace {

ValidatedConfig config() {
    LatticeConfig l;
    l.phases = {0.0, 2.0 * pi / 3.0, 0.0};
    TruncationConfig t;
    t.mu_max = 32;
    t.n_max = 16;
    t.n_steps = 128;
    t.interior_window = 4;
    return validate(l, t);
}

// Start-time sweep at one kappa from a single block set.
void BM_SweepReordered(benchmark::State& state) {
    const ValidatedConfig cfg = config();
    const std::vector<int> idx = start_time_indices(static_cast<int>(state.range(0)), cfg);
    for (auto _ : state) {
        const BlockSet blocks = build_blocks(0.05, cfg);
        for (const CMatrix& U : period_propagators(idx, blocks)) benchmark::DoNotOptimize(diagonalize(U, 0.05, cfg));
    }
}

// The same sweep rebuilding the blocks for every start time.
void BM_SweepRebuilt(benchmark::State& state) {
    const ValidatedConfig cfg = config();
    const std::vector<int> idx = start_time_indices(static_cast<int>(state.range(0)), cfg);
    for (auto _ : state) {
        for (int i : idx) {
            const BlockSet blocks = build_blocks(0.05, cfg, cfg.time_of(i));
            benchmark::DoNotOptimize(diagonalize(period_propagator(0.0, blocks, cfg).matrix, 0.05, cfg));
        }
    }
}

void BM_Diagonalize(benchmark::State& state) {
    LatticeConfig l;
    l.phases = {0.0, 0.0, 0.0};
    TruncationConfig t;
    t.mu_max = static_cast<int>(state.range(0));
    t.n_max = 12;
    t.n_steps = 96;
    t.interior_window = 4;
    const ValidatedConfig cfg = validate(l, t);
    const CMatrix U = period_propagator(0.0, build_blocks(0.05, cfg), cfg).matrix;
    for (auto _ : state) benchmark::DoNotOptimize(diagonalize(U, 0.05, cfg));
}

}  // namespace

BENCHMARK(BM_SweepReordered)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepRebuilt)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Diagonalize)->Arg(24)->Arg(48)->Arg(96)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
