#include <algorithm>
#include <chrono>
#include <filesystem>
#include <unistd.h>

#include <Eigen/Eigenvalues>

#include "floquet/block_cache.hpp"
#include "floquet/modes.hpp"
#include "floquet/observables.hpp"
#include "floquet/propagator.hpp"
#include "harness.hpp"

namespace floquet::acceptance {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// Period propagator at the desk truncation and with n_max and N doubled,
// both against one adaptive-step oracle.
Outcome oracle_agreement() {
    constexpr double kappa = 0.05;
    struct Level {
        int n_max;
        int n_steps;
    };
    const Level levels[] = {{12, 128}, {24, 256}, {48, 512}};
    bool ok = true;
    std::string detail;
    for (double d2 : {0.0, pi}) {
        const ValidatedConfig ref = lattice({0.0, d2, 0.0});
        const CMatrix oracle = oracle_propagator(0.0, ref.period(), kappa, ref).matrix;
        double err[3];
        for (int i = 0; i < 3; ++i) {
            const ValidatedConfig cfg = lattice({0.0, d2, 0.0}, 48, levels[i].n_max, levels[i].n_steps);
            const CMatrix U = period_propagator(0.0, build_blocks(kappa, cfg), cfg).matrix;
            err[i] = (U - oracle).norm() / oracle.norm();
        }
        ok = ok && err[1] < 1e-6 && err[2] < 1e-8 && err[0] > err[1] && err[1] > err[2];
        detail += std::string(d2 == 0.0 ? "(0,0,0)" : "; (0,pi,0)") + " rel 12/128 " + sci(err[0]) + ", 24/256 " + sci(err[1]) +
                  ", 48/512 " + sci(err[2]);
    }
    return {ok, detail + "; need desk < 1e-6, doubled < 1e-8"};
}

Outcome static_limit() {
    const ValidatedConfig cfg = reduced({0.0, 0.0, 0.0}, 0.0);
    const std::vector<double> grid = zone_grid(64, cfg);
    const Spectrum s = band_scan(grid, cfg);
    double worst = 0.0;
    for (int k = 0; k < s.points(); ++k) {
        const CMatrix H = hamiltonian_block(0, grid[k], 0.0, cfg).matrix;
        const Eigen::SelfAdjointEigenSolver<CMatrix> es(H, Eigen::EigenvaluesOnly);
        std::vector<double> folded;
        for (double e : es.eigenvalues()) folded.push_back(fold_quasienergy(e, cfg.omega()));
        worst = std::max(worst, multiset_distance(s.energies[k], folded, cfg.omega()));
    }
    return {worst < 1e-8, "max distance " + sci(worst) + " over 64 kappa, need < 1e-8"};
}

Outcome engineering() {
    const ValidatedConfig cfg = reduced({0.0, 2.0 * pi / 3.0, 0.0});
    const std::vector<int> idx = start_time_indices(32, cfg);
    const double kappas[] = {0.0, 0.4 * cfg.zone_edge()};

    auto t = std::chrono::steady_clock::now();
    double sink = 0.0;
    for (double kappa : kappas) {
        const BlockSet blocks = build_blocks(kappa, cfg);
        const std::vector<CMatrix> Us = period_propagators(idx, blocks);
        for (std::size_t s = 0; s < idx.size(); ++s)
            sink += diagonalize(Us[s], kappa, cfg, idx[s]).modes.front().quasienergy;
    }
    const double reordered = seconds_since(t);

    t = std::chrono::steady_clock::now();
    for (double kappa : kappas) {
        for (int i : idx) {
            const BlockSet blocks = build_blocks(kappa, cfg, cfg.time_of(i));
            sink -= diagonalize(period_propagator(0.0, blocks, cfg).matrix, kappa, cfg, i).modes.front().quasienergy;
        }
    }
    const double rebuilt = seconds_since(t);
    const double ratio = rebuilt / reordered;

    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / ("floquet-acceptance-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    const std::vector<double> grid = zone_grid(17, cfg);
    bool identical = true;
    long hits = 0;
    {
        BlockCache cold(dir);
        const Spectrum a = band_scan(grid, cfg, cached_block_source(cfg, cold));
        BlockCache warm(dir);
        const Spectrum b = band_scan(grid, cfg, cached_block_source(cfg, warm));
        hits = warm.stats().hits;
        identical = a.energies == b.energies && a.shift_classes == b.shift_classes && a.residuals == b.residuals &&
                    a.continuation == b.continuation;
    }
    std::filesystem::remove_all(dir);

    const bool ok = ratio >= 5.0 && identical && hits == static_cast<long>(grid.size());
    char buf[200];
    std::snprintf(buf, sizeof buf, "32 t0 reordered %.2f s vs rebuilt %.2f s, speedup %.1fx (need >= 5); warm rerun %s, %ld/%zu hits",
                  reordered, rebuilt, ratio, identical ? "bit-identical" : "DIFFERS", hits, grid.size());
    (void)sink;
    return {ok, buf};
}

}  // namespace

std::vector<Criterion> propagation_criteria() {
    return {
        {1, "oracle-propagator", oracle_agreement},
        {2, "static-limit", static_limit},
        {12, "reordering-and-cache", engineering},
    };
}

}  // namespace floquet::acceptance
