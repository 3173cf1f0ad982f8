#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "floquet/errors.hpp"
#include "floquet_tools/pipeline.hpp"

namespace {

using namespace floquet;
using namespace floquet::tools;

struct Common {
    std::string config;
    std::string cache_dir;
    bool no_cache = false;
    int workers = 1;
    std::string profile;
    int kappa_points = 0;
};

std::optional<std::filesystem::path> cache_path(const Common& c) {
    if (c.cache_dir.empty()) return std::nullopt;
    return std::filesystem::path(c.cache_dir);
}

RunConfig load_with_profile(const Common& c) {
    RunConfig rc = load_run_config(c.config);
    if (!c.profile.empty()) rc.profile = parse_tolerance_profile(c.profile);
    return rc;
}

int cmd_run(const Common& c, const std::string& sweep_path, const std::string& output_dir, int t0_points) {
    const RunConfig rc = load_with_profile(c);
    RunOptions o;
    o.output_dir = output_dir;
    o.cache_dir = cache_path(c);
    o.use_cache = !c.no_cache;
    o.workers = c.workers;
    o.t0_points = t0_points;
    if (c.kappa_points > 0) o.kappa_points = c.kappa_points;
    const RunSummary s = run(rc, load_sweep(sweep_path), o);
    std::cout << "wrote " << s.files.size() << " files to " << output_dir << " in " << s.wall_seconds << " s\n";
    return s.failed_predicates == 0 ? 0 : 1;
}

int cmd_verify(const Common& c, const std::string& report_path, int t0_points) {
    const RunConfig rc = load_with_profile(c);
    VerifyOptions o;
    o.cache_dir = cache_path(c);
    o.use_cache = !c.no_cache;
    o.workers = c.workers;
    if (c.kappa_points > 0) o.current_kappa_points = c.kappa_points;
    if (t0_points > 0) o.current_t0_points = t0_points;
    const VerifyReport r = verify(rc, o);

    const HamiltonianScan& s = r.scan;
    std::cout << "config " << r.config_hash << "\n"
              << "scan: time-reversal=" << s.time_reversal << " parity=" << s.parity << " (chi=" << s.parity_center
              << ") shift=" << s.shift << "\n";
    for (const std::string& l : s.lint) std::cout << "lint: " << l << "\n";
    for (const SymmetryRecord& rec : r.records) {
        const char* verdict = rec.applicable ? (rec.passed ? "PASS" : "FAIL") : (rec.passed ? "absent" : "not-absent");
        std::cout << "  " << to_string(rec.tag) << ": " << verdict << " residual=" << rec.residual;
        if (!rec.note.empty()) std::cout << " (" << rec.note << ")";
        std::cout << "\n";
    }
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw IOFailure("cannot write " + report_path);
        write_symmetry_jsonl(out, r);
    }
    std::cout << (r.passed() ? "all applicable predicates pass" : "an applicable predicate failed") << "\n";
    return r.passed() ? 0 : 1;
}

BlockCache open_cache(const Common& c) { return BlockCache(cache_path(c).value_or(BlockCache::default_directory())); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Floquet-Bloch spectra, symmetry checks and transport for driven barrier lattices"};
    app.set_version_flag("--version", tool_version());
    app.require_subcommand(1);

    Common c;
    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", c.config, "JSON configuration file");
        if (needs_config) opt->required()->check(CLI::ExistingFile);
        sub->add_option("--cache-dir", c.cache_dir, "block cache directory (default FLOQUET_CACHE_DIR or ./.floquet-cache)");
        sub->add_flag("--no-cache", c.no_cache, "build blocks without touching the cache");
        sub->add_option("--workers", c.workers, "worker threads over kappa")->check(CLI::PositiveNumber);
        sub->add_option("--tolerance-profile", c.profile, "fast or accurate")
            ->check(CLI::IsMember({"fast", "accurate"}));
        sub->add_option("--kappa-points", c.kappa_points, "kappa grid size")->check(CLI::Range(2, 1 << 16));
    };

    std::string sweep, output_dir = "floquet-out", report;
    int t0_points = 32;
    int verify_t0 = 0;

    CLI::App* run_cmd = app.add_subcommand("run", "run a parameter sweep and write datasets");
    add_common(run_cmd, true);
    run_cmd->add_option("--sweep", sweep, "sweep specification (JSON)")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--output-dir", output_dir, "output directory");
    run_cmd->add_option("--t0-points", t0_points, "start times per period for currents")->check(CLI::PositiveNumber);

    CLI::App* verify_cmd = app.add_subcommand("verify", "scan the Hamiltonian and check applicable symmetry identities");
    add_common(verify_cmd, true);
    verify_cmd->add_option("--report", report, "write the JSONL report here");
    verify_cmd->add_option("--t0-points", verify_t0, "start-time pairs for the current check")
        ->check(CLI::PositiveNumber);

    CLI::App* cache_cmd = app.add_subcommand("cache", "inspect or clear the block cache");
    cache_cmd->require_subcommand(1);
    CLI::App* inspect_cmd = cache_cmd->add_subcommand("inspect", "list cached block sets");
    CLI::App* clear_cmd = cache_cmd->add_subcommand("clear", "remove cached block sets");
    for (CLI::App* sub : {inspect_cmd, clear_cmd})
        sub->add_option("--cache-dir", c.cache_dir, "block cache directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return cmd_run(c, sweep, output_dir, t0_points);
        if (*verify_cmd) return cmd_verify(c, report, verify_t0);
        if (*inspect_cmd) {
            const BlockCache cache = open_cache(c);
            std::uintmax_t bytes = 0;
            const auto entries = cache.inspect();
            for (const auto& e : entries) {
                std::cout << e.path.filename().string() << " kappa=" << e.kappa << " D=" << e.dim << " N=" << e.steps
                          << " bytes=" << e.bytes << (e.valid ? "" : " INVALID") << "\n";
                bytes += e.bytes;
            }
            std::cout << entries.size() << " entries, " << bytes << " bytes in " << cache.directory().string() << "\n";
            return 0;
        }
        if (*clear_cmd) {
            BlockCache cache = open_cache(c);
            std::cout << "removed " << cache.clear() << " entries\n";
            return 0;
        }
    } catch (const floquet::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const floquet::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
