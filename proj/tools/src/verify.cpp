#include <algorithm>
#include <cmath>
#include <ostream>

#include "floquet/errors.hpp"
#include "floquet/observables.hpp"
#include "floquet_tools/pipeline.hpp"

namespace floquet::tools {

namespace {

// Residual above which a predicate counts as absent for a broken symmetry.
constexpr double absent_margin = 1e-3;
// Modes with more weight than this outside the interior window are truncation artefacts.
constexpr double max_edge_weight = 1e-3;

struct Recorder {
    std::vector<SymmetryRecord>& out;

    SymmetryRecord& add(IdentityTag tag, double residual, double tolerance, bool applicable, std::string note = {}) {
        SymmetryRecord r;
        r.tag = tag;
        r.residual = residual;
        r.tolerance = tolerance;
        r.applicable = applicable;
        r.passed = applicable ? residual < tolerance : residual > absent_margin;
        r.note = std::move(note);
        out.push_back(std::move(r));
        return out.back();
    }
};

std::vector<FloquetMode> modes_with_trajectories(const BlockSet& blocks, const ValidatedConfig& cfg) {
    Diagonalization d = diagonalize(period_propagator(0.0, blocks, cfg).matrix, blocks.kappa, cfg);
    for (FloquetMode& m : d.modes) attach_trajectory(m, blocks, cfg);
    return std::move(d.modes);
}

std::string join_warnings(const std::vector<std::string>& w) {
    std::string s;
    for (const std::string& x : w) s += (s.empty() ? "" : "; ") + x;
    return s;
}

}  // namespace

bool VerifyReport::passed() const {
    return std::none_of(records.begin(), records.end(), [](const SymmetryRecord& r) { return r.applicable && !r.passed; });
}

VerifyReport verify(const RunConfig& config, const VerifyOptions& options) {
    const ValidatedConfig cfg = config.validated();
    std::optional<BlockCache> own;
    BlockCache* cache = options.shared_cache;
    if (!cache && options.use_cache) cache = &own.emplace(options.cache_dir.value_or(BlockCache::default_directory()));
    const BlockSource source = cache ? cached_block_source(cfg, *cache) : direct_block_source(cfg);

    VerifyReport report;
    report.config_hash = cfg.hash_hex();
    report.scan = scan_hamiltonian_symmetry(cfg);
    const HamiltonianScan& scan = report.scan;
    const bool tr = scan.time_reversal;
    const bool parity = scan.parity;
    const bool shift = scan.shift;
    const double chi = scan.parity_center;
    const int N = cfg.n_steps();
    const int np = cfg.n_cells();
    Recorder rec{report.records};

    const double kappa = options.kappa.value_or(0.37 * cfg.zone_edge());
    const BlockSet plus = source(kappa);
    const BlockSet minus = source(-kappa);
    const CMatrix U_plus = period_propagator(0.0, plus, cfg).matrix;
    const CMatrix U_minus = period_propagator(0.0, minus, cfg).matrix;

    rec.add(IdentityTag::time_reversal_U, check_time_reversal_U(U_plus, U_minus, cfg), 1e-7, tr);

    double general = 0.0;
    for (auto [a, b] : {std::pair{0, N}, std::pair{N / 8, 5 * N / 8}, std::pair{N / 4, N - 1}})
        general = std::max(general, check_time_reversal_general(a, b, plus, minus, cfg));
    rec.add(IdentityTag::time_reversal_U_general, general, 1e-6, tr);

    if (N % 2 == 0) {
        const double r = check_parity_composition(half_period_propagator(minus), half_period_propagator(plus),
                                                  U_plus, kappa, chi, cfg);
        rec.add(IdentityTag::parity_composition, r, 1e-6, parity);
    } else {
        rec.add(IdentityTag::parity_composition, 0.0, 1e-6, false, "odd step count, parity composition not evaluated")
            .passed = false;
    }

    if (np == 1) {
        rec.add(IdentityTag::stripe, stripe_report(U_plus, 1), 1e-20, true,
                "one barrier per cell: every element lies on the stripe, the check is degenerate");
    } else {
        rec.add(IdentityTag::stripe, stripe_report(U_plus, np), 1e-20, shift);
    }

    const std::vector<FloquetMode> modes_plus = modes_with_trajectories(plus, cfg);
    const std::vector<FloquetMode> modes_minus = modes_with_trajectories(minus, cfg);
    auto fbm = [&](IdentityTag tag, FbmKind kind, bool applicable) {
        const FbmReport r = check_fbm_relation(modes_plus, modes_minus, kind, chi, cfg);
        rec.add(tag, r.residual, 1e-6, applicable, join_warnings(r.warnings)).signs = r.signs;
    };
    fbm(IdentityTag::fbm_time_reversal, FbmKind::time_reversal, tr);
    if (N % 2 == 0) {
        fbm(IdentityTag::fbm_parity, FbmKind::parity, parity);
        fbm(IdentityTag::fbm_both, FbmKind::both, tr && parity);
    }

    // Husimi mirror in p at t = 0 for non-degenerate interior kappa = 0 modes.
    const std::vector<double> xs = linspace(0.0, cfg.cell_length(), 40 * np, true);
    const std::vector<double> ps = linspace(-3.0, 3.0, 61, false);
    {
        const BlockSet zero = source(0.0);
        const Diagonalization d = diagonalize(period_propagator(0.0, zero, cfg).matrix, 0.0, cfg);
        const std::size_t M = d.modes.size();
        double worst = 0.0;
        int used = 0;
        for (std::size_t a = 0; a < M; ++a) {
            const double e = d.modes[a].quasienergy;
            const double gap = std::min(circular_distance(e, d.modes[(a + 1) % M].quasienergy, cfg.omega()),
                                        circular_distance(e, d.modes[(a + M - 1) % M].quasienergy, cfg.omega()));
            if (gap < 1e-6 || edge_weight(d.modes[a].components, cfg) > max_edge_weight) continue;
            worst = std::max(worst, husimi_momentum_mirror_residual(
                                        husimi(d.modes[a].components, 0.0, xs, ps, options.husimi_sigma, cfg)));
            ++used;
        }
        if (used == 0) {
            rec.add(IdentityTag::husimi_t, 0.0, 1e-6, false, "no non-degenerate interior mode at kappa = 0, not evaluated")
                .passed = false;
        } else {
            rec.add(IdentityTag::husimi_t, worst, 1e-6, tr,
                    std::to_string(used) + " non-degenerate interior modes at kappa = 0");
        }
    }
    {
        double worst = 0.0;
        int used = 0;
        for (const FloquetMode& m : modes_plus) {
            if (!shift_class(m, cfg).q || edge_weight(m.components, cfg) > max_edge_weight) continue;
            worst = std::max(worst, husimi_shift_residual(husimi(m.components, kappa, xs, ps, options.husimi_sigma, cfg),
                                                          static_cast<int>(xs.size()) / np));
            ++used;
        }
        std::string note = std::to_string(used) + " shift-classified interior modes";
        if (np == 1) note += "; one barrier per cell, the shift is a full cell";
        if (used == 0) {
            rec.add(IdentityTag::husimi_x, 0.0, 1e-6, false, "no shift-classified interior mode, not evaluated").passed =
                false;
        } else {
            rec.add(IdentityTag::husimi_x, worst, 1e-6, shift, note);
        }
    }

    if (!config.transport.packet_width) {
        rec.add(IdentityTag::current_t, 0.0, 1e-5, false, "transport.packet_width not set, current check skipped")
            .passed = false;
    } else if (N % (2 * options.current_t0_points) != 0) {
        rec.add(IdentityTag::current_t, 0.0, 1e-5, false, "start-time grid does not contain t0 + T/2, skipped")
            .passed = false;
    } else {
        const std::vector<int> idx = start_time_indices(2 * options.current_t0_points, cfg);
        const std::vector<KappaModes> table = compute_mode_table(
            cfg, source, kappa_quadrature(options.current_kappa_points, cfg), idx, options.workers);
        const double center = 0.5 * chi;
        const CurrentResult cur = current_sweep(table, idx, *config.transport.packet_width, center, cfg);
        const std::size_t half = idx.size() / 2;
        double worst = 0.0;
        for (std::size_t i = 0; i < half; ++i) worst = std::max(worst, std::abs(cur.current[i] + cur.current[i + half]));
        worst = std::max(worst, std::abs(cur.mean));
        rec.add(IdentityTag::current_t, worst, 1e-5, parity,
                "packet center " + std::to_string(center) + ", mean current " + std::to_string(cur.mean));
    }
    return report;
}

nlohmann::json to_json(const SymmetryRecord& r) {
    nlohmann::json j;
    j["identity"] = std::string(to_string(r.tag));
    j["residual"] = r.residual;
    j["tolerance"] = r.tolerance;
    j["applicable"] = r.applicable;
    j["passed"] = r.passed;
    if (!r.signs.empty()) j["signs"] = r.signs;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

void write_symmetry_jsonl(std::ostream& out, const VerifyReport& report) {
    nlohmann::json head;
    head["config_hash"] = report.config_hash;
    head["scan"] = {{"time_reversal", report.scan.time_reversal},
                    {"time_reversal_residual", report.scan.time_reversal_residual},
                    {"parity", report.scan.parity},
                    {"parity_residual", report.scan.parity_residual},
                    {"parity_center", report.scan.parity_center},
                    {"shift", report.scan.shift},
                    {"shift_residual", report.scan.shift_residual},
                    {"lint", report.scan.lint}};
    out << head.dump() << '\n';
    for (const SymmetryRecord& r : report.records) out << to_json(r).dump() << '\n';
}

std::string tool_version() { return FLOQUET_TOOLS_VERSION; }

}  // namespace floquet::tools
