#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>

#include "floquet/crossing.hpp"
#include "floquet/errors.hpp"
#include "floquet/observables.hpp"
#include "floquet_tools/pipeline.hpp"

namespace floquet::tools {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string point_name(const char* stem, std::size_t i, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%03zu.%s", stem, i, ext);
    return buf;
}

std::string parameter_name(const SweepSpec& s) {
    switch (s.parameter) {
        case SweepParameter::phase: return "delta_" + std::to_string(s.phase_index + 1);
        case SweepParameter::amplitude: return "A";
        case SweepParameter::start_time: return "t0";
        case SweepParameter::kappa_resolution: return "kappa_points";
    }
    return "value";
}

json truncation_json(const TruncationConfig& t) {
    return {{"mu_max", t.mu_max},
            {"n_max", t.n_max},
            {"p_max", t.p_max},
            {"n_steps", t.n_steps},
            {"interior_window", t.interior_window}};
}

class CsvFile {
public:
    CsvFile(const fs::path& path, std::vector<fs::path>& files) : path_(path), out_(path) {
        if (!out_) throw IOFailure("cannot write " + path.string());
        files.push_back(path);
        out_ << "# floquet " << tool_version() << '\n';
    }
    void meta(const std::string& line) { out_ << "# " << line << '\n'; }
    void config(const ValidatedConfig& cfg) {
        const TruncationConfig& t = cfg.truncation();
        meta("config_hash=" + cfg.hash_hex());
        meta("truncation mu_max=" + std::to_string(t.mu_max) + " n_max=" + std::to_string(t.n_max) +
             " p_max=" + std::to_string(t.p_max) + " n_steps=" + std::to_string(t.n_steps) +
             " interior_window=" + std::to_string(t.interior_window));
    }
    template <class... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cells, first = false), ...);
        out_ << '\n';
    }
    ~CsvFile() noexcept(false) {
        out_.close();
        if (!out_ && std::uncaught_exceptions() == 0) throw IOFailure("write failed: " + path_.string());
    }

private:
    fs::path path_;
    std::ofstream out_;
};

struct GapRow {
    std::size_t point;
    double value;
    std::string kind;
    double kappa;
    double quasienergy;
    double gap;
    int class_a;
    int class_b;
    std::string status;
};

// Grid-level closest approaches in the energy window, refined on request.
void collect_gaps(const Spectrum& s, const ValidatedConfig& cfg, double t0, const CrossingWindow& w,
                  std::size_t point, double value, std::vector<GapRow>& rows) {
    const double half = 0.5 * s.omega;
    const double lo = w.lo.value_or(-half);
    const double hi = w.hi.value_or(half);
    const LevelProbe probe = make_level_probe(cfg, t0);

    const std::vector<CrossingCandidate> crossings = find_class_crossings(s, lo, hi);
    for (const CrossingCandidate& c : crossings) {
        GapRow r{point, value, "class", c.kappa, c.quasienergy, 0.0,
                 s.shift_classes[c.grid_index][c.pair.a], s.shift_classes[c.grid_index][c.pair.b], "grid"};
        r.gap = circular_distance(s.energies[c.grid_index][c.pair.a], s.energies[c.grid_index][c.pair.b], s.omega);
        if (w.refine) {
            try {
                const GapResult g = refine_crossing(s, c, probe);
                r.kappa = g.kappa;
                r.quasienergy = g.quasienergy;
                r.gap = g.gap;
                r.status = g.converged ? "refined" : "unconverged";
            } catch (const NoApproach&) {
                r.status = "no-approach";
            }
        }
        rows.push_back(std::move(r));
    }
    if (!crossings.empty()) return;

    // Without shift classes: local minima of the spacing of adjacent sorted levels.
    const int K = s.points();
    for (int a = 0; a + 1 < s.bands(); ++a) {
        auto spacing = [&](int k) { return s.energies[k][a + 1] - s.energies[k][a]; };
        for (int k = 1; k + 1 < K; ++k) {
            const double d = spacing(k);
            const double mid = 0.5 * (s.energies[k][a] + s.energies[k][a + 1]);
            if (!(d < spacing(k - 1) && d <= spacing(k + 1)) || mid < lo || mid > hi) continue;
            GapRow r{point, value, "adjacent", s.kappas[k], mid, d, -1, -1, "grid"};
            if (w.refine) {
                try {
                    const GapResult g = crossing_gap(s, BandPair{a, a + 1}, {s.kappas[k - 1], s.kappas[k + 1]}, probe);
                    r.kappa = g.kappa;
                    r.quasienergy = g.quasienergy;
                    r.gap = g.gap;
                    r.status = g.converged ? "refined" : "unconverged";
                } catch (const NoApproach&) {
                    r.status = "no-approach";
                }
            }
            rows.push_back(std::move(r));
        }
    }
}

void write_spectrum(const fs::path& path, const Spectrum& s, const ValidatedConfig& cfg, double t0,
                    std::vector<fs::path>& files) {
    CsvFile csv(path, files);
    csv.config(cfg);
    csv.meta("kappa_points=" + std::to_string(s.points()) + " t0=" + num(t0));
    for (const std::string& w : s.warnings) csv.meta("warning " + w);
    csv.row("kappa_index", "kappa", "band", "quasienergy", "shift_class", "residual");
    for (int k = 0; k < s.points(); ++k)
        for (int a = 0; a < s.bands(); ++a)
            csv.row(k, num(s.kappas[k]), a, num(s.energies[k][a]), s.shift_classes[k][a], num(s.residuals[k][a]));
}

double kinetic_energy(const CVector& v, double kappa, const ValidatedConfig& cfg) {
    double e = 0.0;
    for (int r = 0; r < cfg.dim(); ++r) {
        const double k = cfg.wavenumber(cfg.mu_of(r), kappa);
        e += 0.5 * k * k * std::norm(v(r));
    }
    return e;
}

void write_husimi(const fs::path& path, const HusimiRequest& h, const BlockSet& blocks, double t0,
                  const ValidatedConfig& cfg, std::vector<fs::path>& files) {
    const int start = snap_time_index(t0, cfg);
    const Diagonalization d = diagonalize(period_propagator(t0, blocks, cfg).matrix, h.kappa, cfg, start);
    std::vector<int> order(d.modes.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> ke(d.modes.size());
    for (std::size_t a = 0; a < d.modes.size(); ++a) ke[a] = kinetic_energy(d.modes[a].components, h.kappa, cfg);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return ke[a] < ke[b]; });

    const std::vector<double> xs = linspace(0.0, cfg.cell_length(), h.x_points, true);
    const std::vector<double> ps = linspace(-h.p_extent, h.p_extent, h.p_points, false);
    CsvFile csv(path, files);
    csv.config(cfg);
    csv.meta("kappa=" + num(h.kappa) + " sigma=" + num(h.sigma) + " t=" + num(start * cfg.dt()));
    csv.row("band", "quasienergy", "x", "p", "Q");
    const int count = std::min<int>(h.modes, static_cast<int>(order.size()));
    for (int i = 0; i < count; ++i) {
        const FloquetMode& m = d.modes[order[i]];
        const HusimiGrid q = husimi(m.components, h.kappa, xs, ps, h.sigma, cfg, start * cfg.dt());
        for (std::size_t ix = 0; ix < xs.size(); ++ix)
            for (std::size_t ip = 0; ip < ps.size(); ++ip)
                csv.row(order[i], num(m.quasienergy), num(xs[ix]), num(ps[ip]),
                        num(q.values(static_cast<Eigen::Index>(ix), static_cast<Eigen::Index>(ip))));
    }
}

}  // namespace

RunSummary run(const RunConfig& base, const SweepSpec& sweep, const RunOptions& options) {
    const auto started = std::chrono::steady_clock::now();
    std::error_code ec;
    fs::create_directories(options.output_dir, ec);
    if (ec) throw IOFailure("cannot create output directory " + options.output_dir.string() + ": " + ec.message());
    if (sweep.values.empty() || sweep.outputs.empty()) throw ConfigError("sweep needs values and outputs");
    if (options.t0_points < 1) throw ConfigError("t0 points must be positive");

    std::optional<BlockCache> cache;
    if (options.use_cache) cache.emplace(options.cache_dir.value_or(BlockCache::default_directory()));

    RunSummary summary;
    std::vector<fs::path>& files = summary.files;
    json points = json::array();
    std::vector<GapRow> gaps;
    std::vector<std::pair<double, double>> jbar;
    const std::string pname = parameter_name(sweep);

    for (std::size_t i = 0; i < sweep.values.size(); ++i) {
        const double value = sweep.values[i];
        RunConfig rc = apply_sweep_value(base, sweep, value);
        if (options.profile) rc.profile = *options.profile;
        const ValidatedConfig cfg = rc.validated();
        const int K = sweep.parameter == SweepParameter::kappa_resolution
                          ? rc.transport.kappa_points
                          : options.kappa_points.value_or(rc.transport.kappa_points);
        const double t0 = sweep.parameter == SweepParameter::start_time ? value : 0.0;
        const BlockSource source = cache ? cached_block_source(cfg, *cache) : direct_block_source(cfg);

        json point = {{"index", i},
                      {"parameter", pname},
                      {"value", value},
                      {"config_hash", cfg.hash_hex()},
                      {"phases", rc.lattice.phases},
                      {"drive_amplitude", rc.lattice.drive_amplitude},
                      {"kappa_points", K},
                      {"t0_index", snap_time_index(t0, cfg)}};
        std::cerr << "[" << i + 1 << "/" << sweep.values.size() << "] " << pname << " = " << num(value) << '\n';

        if (sweep.wants(OutputKind::spectrum)) {
            ScanOptions so;
            so.workers = options.workers;
            so.t0 = t0;
            const Spectrum s = band_scan(zone_grid(K, cfg), cfg, source, so);
            write_spectrum(options.output_dir / point_name("spectrum", i, "csv"), s, cfg, t0, files);
            collect_gaps(s, cfg, t0, sweep.crossings, i, value, gaps);
        }
        if (sweep.wants(OutputKind::currents)) {
            if (!rc.transport.packet_width) throw ConfigError("currents need transport.packet_width");
            const std::vector<int> idx = sweep.parameter == SweepParameter::start_time
                                             ? std::vector<int>{snap_time_index(t0, cfg)}
                                             : start_time_indices(options.t0_points, cfg);
            const std::vector<KappaModes> table =
                compute_mode_table(cfg, source, kappa_quadrature(K, cfg), idx, options.workers);
            const CurrentResult cur =
                current_sweep(table, idx, *rc.transport.packet_width, rc.transport.packet_center, cfg);
            CsvFile csv(options.output_dir / point_name("currents", i, "csv"), files);
            csv.config(cfg);
            csv.meta("kappa_points=" + std::to_string(K) + " packet_width=" + num(*rc.transport.packet_width) +
                     " packet_center=" + num(rc.transport.packet_center));
            csv.row("t0_index", "t0", "current", "completeness");
            for (std::size_t s = 0; s < cur.current.size(); ++s)
                csv.row(cur.time_indices[s], num(cur.t0[s]), num(cur.current[s]), num(cur.completeness[s]));
            jbar.emplace_back(value, cur.mean);
            point["mean_current"] = cur.mean;
        }
        if (sweep.wants(OutputKind::husimi)) {
            write_husimi(options.output_dir / point_name("husimi", i, "csv"), sweep.husimi,
                         source(sweep.husimi.kappa), t0, cfg, files);
        }
        if (sweep.wants(OutputKind::symmetry_report)) {
            VerifyOptions vo;
            vo.workers = options.workers;
            vo.shared_cache = cache ? &*cache : nullptr;
            vo.use_cache = options.use_cache;
            const VerifyReport rep = verify(rc, vo);
            const fs::path path = options.output_dir / point_name("symmetry", i, "jsonl");
            std::ofstream out(path);
            if (!out) throw IOFailure("cannot write " + path.string());
            write_symmetry_jsonl(out, rep);
            files.push_back(path);
            point["symmetry_passed"] = rep.passed();
            if (!rep.passed()) ++summary.failed_predicates;
        }
        points.push_back(std::move(point));
    }

    const ValidatedConfig base_cfg = base.validated();
    if (sweep.wants(OutputKind::spectrum)) {
        CsvFile csv(options.output_dir / "crossing_gaps.csv", files);
        csv.config(base_cfg);
        csv.row("point", pname, "kind", "kappa", "quasienergy", "gap", "class_a", "class_b", "status");
        for (const GapRow& r : gaps)
            csv.row(r.point, num(r.value), r.kind, num(r.kappa), num(r.quasienergy), num(r.gap), r.class_a, r.class_b,
                    r.status);
    }
    if (!jbar.empty()) {
        CsvFile csv(options.output_dir / "mean_current.csv", files);
        csv.config(base_cfg);
        csv.row(pname, "mean_current");
        for (const auto& [v, j] : jbar) csv.row(num(v), num(j));
    }

    if (cache) summary.cache = cache->stats();
    summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::cerr << "cache: hits=" << summary.cache.hits << " misses=" << summary.cache.misses
              << " corrupt=" << summary.cache.corrupt << '\n';

    json manifest;
    manifest["tool"] = "floquet";
    manifest["version"] = tool_version();
    manifest["config_hash"] = base_cfg.hash_hex();
    manifest["config"] = to_json(base);
    manifest["truncation"] = truncation_json(base_cfg.truncation());
    manifest["tolerance_profile"] = std::string(to_string(options.profile.value_or(base.profile)));
    manifest["sweep"] = {{"parameter", pname}, {"values", sweep.values}};
    manifest["points"] = std::move(points);
    manifest["workers"] = options.workers;
    manifest["wall_time_seconds"] = summary.wall_seconds;
    manifest["cache"] = {{"enabled", options.use_cache},
                         {"hits", summary.cache.hits},
                         {"misses", summary.cache.misses},
                         {"corrupt", summary.cache.corrupt}};
    json listed = json::array();
    for (const fs::path& f : files) listed.push_back(f.filename().string());
    manifest["files"] = listed;
    const fs::path mpath = options.output_dir / "manifest.json";
    std::ofstream mout(mpath);
    if (!mout) throw IOFailure("cannot write " + mpath.string());
    mout << manifest.dump(2) << '\n';
    files.push_back(mpath);
    return summary;
}

}  // namespace floquet::tools
