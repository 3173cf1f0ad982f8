#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "floquet/errors.hpp"
#include "floquet_tools/pipeline.hpp"

using namespace floquet;
using namespace floquet::tools;
namespace fs = std::filesystem;

namespace {

RunConfig small_config(std::vector<double> phases) {
    RunConfig rc;
    rc.lattice.phases = std::move(phases);
    rc.truncation.mu_max = 6;
    rc.truncation.n_max = 6;
    rc.truncation.n_steps = 16;
    rc.truncation.interior_window = 2;
    rc.transport.kappa_points = 5;
    return rc;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Pipeline : public ::testing::Test {
protected:
    void SetUp() override {
        root_ = fs::temp_directory_path() /
                ("floquet_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(root_);
        fs::create_directories(root_);
    }
    void TearDown() override { fs::remove_all(root_); }
    fs::path root_;
};

}  // namespace

TEST(Sweep, ParsesPhaseSweep) {
    const SweepSpec s = parse_sweep(nlohmann::json::parse(
        R"({"parameter": "delta", "index": 1, "values": [0, "0.2pi", "2pi/5"], "outputs": ["spectrum", "symmetry-report"],
            "crossings": {"window": [0.265, 0.285]}})"));
    EXPECT_EQ(s.parameter, SweepParameter::phase);
    EXPECT_EQ(s.phase_index, 1);
    ASSERT_EQ(s.values.size(), 3u);
    EXPECT_NEAR(s.values[1], 0.2 * pi, 1e-15);
    EXPECT_NEAR(s.values[2], 0.4 * pi, 1e-15);
    EXPECT_TRUE(s.wants(OutputKind::spectrum));
    EXPECT_FALSE(s.wants(OutputKind::currents));
    EXPECT_TRUE(s.crossings.refine);
    EXPECT_DOUBLE_EQ(*s.crossings.lo, 0.265);
}

TEST(Sweep, RejectsBadSpecs) {
    using nlohmann::json;
    EXPECT_THROW(parse_sweep(json::parse(R"({"parameter": "delta", "values": [], "outputs": ["spectrum"]})")),
                 ConfigError);
    EXPECT_THROW(parse_sweep(json::parse(R"({"parameter": "omega", "values": [1], "outputs": ["spectrum"]})")),
                 ConfigError);
    EXPECT_THROW(parse_sweep(json::parse(R"({"parameter": "A", "values": [1], "outputs": ["plots"]})")), ConfigError);
    EXPECT_THROW(parse_sweep(json::parse(R"({"parameter": "A", "values": [1]})")), ConfigError);
    EXPECT_THROW(load_sweep("/nonexistent/sweep.json"), IOFailure);
}

TEST(Sweep, AppliesValuesWithinValidity) {
    const RunConfig base = small_config({0.0, 0.0, 0.0});
    SweepSpec s;
    s.parameter = SweepParameter::phase;
    s.phase_index = 2;
    EXPECT_DOUBLE_EQ(apply_sweep_value(base, s, 0.5).lattice.phases[2], 0.5);
    s.phase_index = 3;
    EXPECT_THROW(apply_sweep_value(base, s, 0.5), ConfigError);
    s.parameter = SweepParameter::amplitude;
    EXPECT_DOUBLE_EQ(apply_sweep_value(base, s, 1.25).lattice.drive_amplitude, 1.25);
    EXPECT_THROW(apply_sweep_value(base, s, 4.9), BarrierOverlap);
    s.parameter = SweepParameter::kappa_resolution;
    EXPECT_EQ(apply_sweep_value(base, s, 9.0).transport.kappa_points, 9);
    EXPECT_THROW(apply_sweep_value(base, s, 2.5), ConfigError);
}

TEST_F(Pipeline, SpectrumSweepWritesDatasets) {
    SweepSpec s;
    s.parameter = SweepParameter::phase;
    s.phase_index = 1;
    s.values = {0.0, 0.2 * pi};
    s.outputs = {OutputKind::spectrum, OutputKind::husimi};
    s.husimi.x_points = 6;
    s.husimi.p_points = 5;
    RunOptions o;
    o.output_dir = root_ / "out";
    o.cache_dir = root_ / "cache";
    const RunSummary r = run(small_config({0.0, 0.0, 0.0}), s, o);
    for (const char* name : {"spectrum_000.csv", "spectrum_001.csv", "husimi_000.csv", "crossing_gaps.csv",
                             "manifest.json"})
        EXPECT_TRUE(fs::exists(o.output_dir / name)) << name;
    const std::string spectrum = slurp(o.output_dir / "spectrum_000.csv");
    EXPECT_NE(spectrum.find("# config_hash="), std::string::npos);
    EXPECT_NE(spectrum.find("# truncation mu_max=6 n_max=6"), std::string::npos);
    EXPECT_EQ(r.cache.misses, 10);

    std::ifstream in(o.output_dir / "manifest.json");
    const nlohmann::json m = nlohmann::json::parse(in);
    EXPECT_EQ(m.at("points").size(), 2u);
    EXPECT_EQ(m.at("cache").at("misses"), 10);
    EXPECT_TRUE(m.contains("wall_time_seconds"));
    EXPECT_EQ(m.at("truncation").at("n_steps"), 16);
}

TEST_F(Pipeline, RerunIsByteIdenticalAndUsesCache) {
    RunConfig base = small_config({0.0, 2.0 * pi / 3.0, 0.0});
    base.transport.packet_width = 20.0;
    base.transport.packet_center = 20.0;
    SweepSpec s;
    s.parameter = SweepParameter::phase;
    s.phase_index = 2;
    s.values = {0.0, 0.1 * pi};
    s.outputs = {OutputKind::spectrum, OutputKind::currents};
    RunOptions o;
    o.cache_dir = root_ / "cache";
    o.t0_points = 4;
    o.output_dir = root_ / "cold";
    const RunSummary cold = run(base, s, o);
    o.output_dir = root_ / "warm";
    o.workers = 2;
    const RunSummary warm = run(base, s, o);
    EXPECT_EQ(warm.cache.misses, 0);
    EXPECT_GT(warm.cache.hits, 0);
    o.output_dir = root_ / "nocache";
    o.use_cache = false;
    run(base, s, o);
    for (const char* name : {"spectrum_000.csv", "spectrum_001.csv", "currents_000.csv", "currents_001.csv",
                             "mean_current.csv", "crossing_gaps.csv"}) {
        const std::string a = slurp(root_ / "cold" / name);
        EXPECT_FALSE(a.empty()) << name;
        EXPECT_EQ(a, slurp(root_ / "warm" / name)) << name;
        EXPECT_EQ(a, slurp(root_ / "nocache" / name)) << name;
    }
    (void)cold;
}

TEST_F(Pipeline, CurrentsNeedPacketWidth) {
    SweepSpec s;
    s.parameter = SweepParameter::amplitude;
    s.values = {1.0};
    s.outputs = {OutputKind::currents};
    RunOptions o;
    o.output_dir = root_ / "out";
    o.use_cache = false;
    EXPECT_THROW(run(small_config({0.0, 0.0, 0.0}), s, o), ConfigError);
}

// Large enough that interior modes exist for the Husimi checks.
RunConfig verify_config(std::vector<double> phases) {
    RunConfig rc = small_config(std::move(phases));
    rc.truncation.mu_max = 24;
    rc.truncation.n_max = 16;
    rc.truncation.n_steps = 64;
    rc.truncation.interior_window = 4;
    return rc;
}

TEST(Verify, UniformDrivingPassesEverything) {
    RunConfig rc = verify_config({0.0, 0.0, 0.0});
    rc.transport.packet_width = 20.0;
    VerifyOptions o;
    o.use_cache = false;
    o.current_t0_points = 4;
    o.current_kappa_points = 5;
    const VerifyReport r = verify(rc, o);
    EXPECT_TRUE(r.scan.time_reversal && r.scan.parity && r.scan.shift);
    for (const SymmetryRecord& rec : r.records) {
        EXPECT_TRUE(rec.applicable) << to_string(rec.tag);
        EXPECT_TRUE(rec.passed) << to_string(rec.tag) << " residual " << rec.residual;
    }
    EXPECT_TRUE(r.passed());
    std::ostringstream out;
    write_symmetry_jsonl(out, r);
    std::istringstream lines(out.str());
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        EXPECT_TRUE(nlohmann::json::parse(line).is_object());
        ++count;
    }
    EXPECT_EQ(count, static_cast<int>(r.records.size()) + 1);
}

TEST(Verify, BrokenSymmetriesAreAbsent) {
    VerifyOptions o;
    o.use_cache = false;
    const VerifyReport r = verify(verify_config({0.0, pi, pi / 4.0}), o);
    EXPECT_FALSE(r.scan.time_reversal || r.scan.parity || r.scan.shift);
    for (const SymmetryRecord& rec : r.records) {
        EXPECT_FALSE(rec.applicable) << to_string(rec.tag);
        // No packet width is set and no mode carries a shift class: both are skipped.
        if (rec.tag == IdentityTag::current_t || rec.tag == IdentityTag::husimi_x) {
            EXPECT_NE(rec.note.find(rec.tag == IdentityTag::current_t ? "skipped" : "not evaluated"), std::string::npos);
        } else {
            EXPECT_TRUE(rec.passed) << to_string(rec.tag) << " residual " << rec.residual;
        }
    }
    EXPECT_TRUE(r.passed());
}

TEST(Verify, HusimiWithoutInteriorModesIsNotEvaluated) {
    VerifyOptions o;
    o.use_cache = false;
    const VerifyReport r = verify(small_config({0.0, 0.0, 0.0}), o);
    for (const SymmetryRecord& rec : r.records) {
        if (rec.tag != IdentityTag::husimi_t && rec.tag != IdentityTag::husimi_x) continue;
        EXPECT_FALSE(rec.applicable) << to_string(rec.tag);
        EXPECT_FALSE(rec.passed) << to_string(rec.tag);
        EXPECT_NE(rec.note.find("not evaluated"), std::string::npos);
    }
}

TEST(Verify, SingleBarrierCellNotesDegenerateStripe) {
    VerifyOptions o;
    o.use_cache = false;
    const VerifyReport r = verify(small_config({0.0}), o);
    bool found = false;
    for (const SymmetryRecord& rec : r.records)
        if (rec.tag == IdentityTag::stripe) {
            found = true;
            EXPECT_EQ(rec.residual, 0.0);
            EXPECT_NE(rec.note.find("degenerate"), std::string::npos);
        }
    EXPECT_TRUE(found);
}
