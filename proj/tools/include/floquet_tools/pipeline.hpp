#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "floquet/block_cache.hpp"
#include "floquet/config_io.hpp"
#include "floquet/symmetry.hpp"

namespace floquet::tools {

enum class SweepParameter { phase, amplitude, start_time, kappa_resolution };
enum class OutputKind { spectrum, currents, husimi, symmetry_report };

struct CrossingWindow {
    std::optional<double> lo;
    std::optional<double> hi;
    bool refine = false;
};

struct HusimiRequest {
    double kappa = 0.0;
    double sigma = 0.5;
    int x_points = 120;
    int p_points = 121;
    double p_extent = 3.0;
    int modes = 1;  // lowest kinetic energy modes to export
};

struct SweepSpec {
    SweepParameter parameter = SweepParameter::phase;
    int phase_index = 0;
    std::vector<double> values;
    std::vector<OutputKind> outputs;
    CrossingWindow crossings;
    HusimiRequest husimi;

    bool wants(OutputKind kind) const;
};

// {"parameter": "delta" | "amplitude" | "t0" | "kappa_points", "index": i,
//  "values": [...], "outputs": [...], "crossings": {...}, "husimi": {...}}
SweepSpec parse_sweep(const nlohmann::json& doc);
SweepSpec load_sweep(const std::filesystem::path& path);

// Base configuration with the sweep value applied; throws ConfigError when
// the result is outside the validity ranges.
RunConfig apply_sweep_value(const RunConfig& base, const SweepSpec& sweep, double value);

struct RunOptions {
    std::filesystem::path output_dir = "floquet-out";
    std::optional<std::filesystem::path> cache_dir;
    bool use_cache = true;
    std::optional<int> kappa_points;
    int t0_points = 32;
    int workers = 1;
    std::optional<ToleranceProfile> profile;
};

struct RunSummary {
    std::vector<std::filesystem::path> files;
    BlockCache::Stats cache;
    double wall_seconds = 0.0;
    int failed_predicates = 0;
};

RunSummary run(const RunConfig& base, const SweepSpec& sweep, const RunOptions& options);

struct VerifyOptions {
    std::optional<double> kappa;  // generic probe, default 0.37 of the zone edge
    int current_kappa_points = 16;
    int current_t0_points = 8;
    double husimi_sigma = 0.5;
    int workers = 1;
    std::optional<std::filesystem::path> cache_dir;
    bool use_cache = true;
    BlockCache* shared_cache = nullptr;  // takes precedence over cache_dir
};

struct VerifyReport {
    std::string config_hash;
    HamiltonianScan scan;
    std::vector<SymmetryRecord> records;

    // False when an applicable predicate fails.
    bool passed() const;
};

VerifyReport verify(const RunConfig& config, const VerifyOptions& options);

nlohmann::json to_json(const SymmetryRecord& record);
void write_symmetry_jsonl(std::ostream& out, const VerifyReport& report);

std::string tool_version();

}  // namespace floquet::tools
