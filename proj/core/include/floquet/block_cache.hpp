#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "floquet/lattice_config.hpp"
#include "floquet/propagator.hpp"

namespace floquet {

// On-disk store of base short-time blocks, one file per (config hash, kappa).
//
// Layout, little endian:
//   char[4]  magic "FLQB"
//   u32      format version
//   u32      dim D, u32 steps N, u32 series order
//   f64      kappa, f64 base time
//   u64      config hash
//   u32      crc32
//   payload  N blocks of D*D complex<double>, column major
//   trailer  u32 warning count, then u32 length + bytes per warning
// The checksum covers payload and trailer.
class BlockCache {
public:
    static constexpr std::uint32_t format_version = 2;

    explicit BlockCache(std::filesystem::path directory);

    // FLOQUET_CACHE_DIR when set, otherwise ./.floquet-cache.
    static std::filesystem::path default_directory();

    const std::filesystem::path& directory() const noexcept { return dir_; }
    std::filesystem::path path_for(const ValidatedConfig& cfg, double kappa) const;

    // Missing file gives nullopt; a corrupt file is removed, counted and
    // reported as nullopt so the caller rebuilds.
    std::optional<BlockSet> load(const ValidatedConfig& cfg, double kappa);
    void store(const ValidatedConfig& cfg, const BlockSet& blocks);
    BlockSet get_or_build(const ValidatedConfig& cfg, double kappa, const SeriesOptions& options = {});

    struct Stats {
        long hits = 0;
        long misses = 0;
        long corrupt = 0;
    };
    Stats stats() const noexcept { return {hits_.load(), misses_.load(), corrupt_.load()}; }

    struct Entry {
        std::filesystem::path path;
        std::uint64_t config_hash = 0;
        double kappa = 0.0;
        int dim = 0;
        int steps = 0;
        std::uintmax_t bytes = 0;
        bool valid = false;
    };
    std::vector<Entry> inspect() const;
    std::size_t clear();

private:
    std::filesystem::path dir_;
    std::atomic<long> hits_{0};
    std::atomic<long> misses_{0};
    std::atomic<long> corrupt_{0};
};

// Reads a cache file, throwing CacheCorruption on any mismatch.
BlockSet read_block_file(const std::filesystem::path& path, std::uint64_t expected_hash);

}  // namespace floquet
