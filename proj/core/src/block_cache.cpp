#include "floquet/block_cache.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include <unistd.h>
#include <zlib.h>

#include "floquet/errors.hpp"

namespace floquet {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little, "cache format assumes little endian");

constexpr char magic[4] = {'F', 'L', 'Q', 'B'};

#pragma pack(push, 1)
struct Header {
    char magic[4];
    std::uint32_t version;
    std::uint32_t dim;
    std::uint32_t steps;
    std::uint32_t order;
    double kappa;
    double base_time;
    std::uint64_t hash;
    std::uint32_t crc;
};
#pragma pack(pop)

uLong crc_update(uLong crc, const void* data, std::size_t left) {
    const auto* bytes = static_cast<const Bytef*>(data);
    while (left > 0) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
        crc = crc32(crc, bytes, chunk);
        bytes += chunk;
        left -= chunk;
    }
    return crc;
}

std::uint32_t crc_of(const std::vector<cplx>& payload, const std::string& trailer) {
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc_update(crc, payload.data(), payload.size() * sizeof(cplx));
    crc = crc_update(crc, trailer.data(), trailer.size());
    return static_cast<std::uint32_t>(crc);
}

void put_u32(std::string& out, std::uint32_t v) { out.append(reinterpret_cast<const char*>(&v), sizeof v); }

// Trailer: u32 count, then per warning u32 length and the bytes.
std::string encode_warnings(const std::vector<std::string>& warnings) {
    std::string out;
    put_u32(out, static_cast<std::uint32_t>(warnings.size()));
    for (const std::string& w : warnings) {
        put_u32(out, static_cast<std::uint32_t>(w.size()));
        out += w;
    }
    return out;
}

std::vector<std::string> decode_warnings(const std::string& trailer, const fs::path& path) {
    std::size_t pos = 0;
    auto get_u32 = [&] {
        std::uint32_t v = 0;
        if (trailer.size() - pos < sizeof v) throw CacheCorruption("truncated trailer in " + path.string());
        std::memcpy(&v, trailer.data() + pos, sizeof v);
        pos += sizeof v;
        return v;
    };
    const std::uint32_t count = get_u32();
    std::vector<std::string> out;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t len = get_u32();
        if (trailer.size() - pos < len) throw CacheCorruption("truncated trailer in " + path.string());
        out.emplace_back(trailer.substr(pos, len));
        pos += len;
    }
    if (pos != trailer.size()) throw CacheCorruption("trailing bytes in " + path.string());
    return out;
}

Header read_header(std::ifstream& in, const fs::path& path) {
    Header h{};
    if (!in.read(reinterpret_cast<char*>(&h), sizeof h))
        throw CacheCorruption("truncated header in " + path.string());
    if (std::memcmp(h.magic, magic, 4) != 0) throw CacheCorruption("bad magic in " + path.string());
    if (h.version != BlockCache::format_version)
        throw CacheCorruption("unsupported cache version in " + path.string());
    return h;
}

std::atomic<unsigned> temp_counter{0};

}  // namespace

BlockCache::BlockCache(fs::path directory) : dir_(std::move(directory)) {}

fs::path BlockCache::default_directory() {
    if (const char* env = std::getenv("FLOQUET_CACHE_DIR"); env != nullptr && *env != '\0') return env;
    return fs::current_path() / ".floquet-cache";
}

fs::path BlockCache::path_for(const ValidatedConfig& cfg, double kappa) const {
    char name[64];
    std::snprintf(name, sizeof name, "%016llx_%016llx.flqb", static_cast<unsigned long long>(cfg.hash()),
                  static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(kappa)));
    return dir_ / name;
}

BlockSet read_block_file(const fs::path& path, std::uint64_t expected_hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOFailure("cannot open cache file " + path.string());
    const Header h = read_header(in, path);
    if (h.hash != expected_hash) throw CacheCorruption("config hash mismatch in " + path.string());

    const std::size_t D = h.dim;
    const std::size_t count = static_cast<std::size_t>(h.steps) * D * D;
    std::vector<cplx> payload(count);
    if (!in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(count * sizeof(cplx))))
        throw CacheCorruption("truncated payload in " + path.string());
    const std::string trailer{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (crc_of(payload, trailer) != h.crc) throw CacheCorruption("checksum mismatch in " + path.string());

    BlockSet set;
    set.kappa = h.kappa;
    set.base_time = h.base_time;
    set.series_order = static_cast<int>(h.order);
    set.warnings = decode_warnings(trailer, path);
    set.blocks.reserve(h.steps);
    for (std::uint32_t j = 0; j < h.steps; ++j)
        set.blocks.emplace_back(Eigen::Map<const CMatrix>(payload.data() + j * D * D,
                                                          static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D)));
    return set;
}

std::optional<BlockSet> BlockCache::load(const ValidatedConfig& cfg, double kappa) {
    const fs::path path = path_for(cfg, kappa);
    std::error_code ec;
    if (!fs::exists(path, ec)) {
        ++misses_;
        return std::nullopt;
    }
    try {
        BlockSet set = read_block_file(path, cfg.hash());
        if (set.size() != cfg.n_steps() || set.blocks.front().rows() != cfg.dim() ||
            std::bit_cast<std::uint64_t>(set.kappa) != std::bit_cast<std::uint64_t>(kappa))
            throw CacheCorruption("shape or kappa mismatch in " + path.string());
        ++hits_;
        return set;
    } catch (const CacheCorruption&) {
        ++corrupt_;
        ++misses_;
        fs::remove(path, ec);
        return std::nullopt;
    }
}

void BlockCache::store(const ValidatedConfig& cfg, const BlockSet& blocks) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IOFailure("cannot create cache directory " + dir_.string() + ": " + ec.message());

    const std::size_t D = static_cast<std::size_t>(cfg.dim());
    std::vector<cplx> payload;
    payload.reserve(blocks.blocks.size() * D * D);
    for (const CMatrix& b : blocks.blocks) payload.insert(payload.end(), b.data(), b.data() + b.size());

    Header h{};
    std::memcpy(h.magic, magic, 4);
    h.version = format_version;
    h.dim = static_cast<std::uint32_t>(D);
    h.steps = static_cast<std::uint32_t>(blocks.blocks.size());
    h.order = static_cast<std::uint32_t>(blocks.series_order);
    h.kappa = blocks.kappa;
    h.base_time = blocks.base_time;
    h.hash = cfg.hash();
    const std::string trailer = encode_warnings(blocks.warnings);
    h.crc = crc_of(payload, trailer);

    const fs::path target = path_for(cfg, blocks.kappa);
    const fs::path temp = target.string() + ".tmp." + std::to_string(::getpid()) + "." +
                          std::to_string(temp_counter.fetch_add(1));
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw IOFailure("cannot write cache file " + temp.string());
        out.write(reinterpret_cast<const char*>(&h), sizeof h);
        out.write(reinterpret_cast<const char*>(payload.data()),
                  static_cast<std::streamsize>(payload.size() * sizeof(cplx)));
        out.write(trailer.data(), static_cast<std::streamsize>(trailer.size()));
        if (!out) throw IOFailure("short write to " + temp.string());
    }
    fs::rename(temp, target, ec);
    if (ec) {
        fs::remove(temp, ec);
        throw IOFailure("cannot publish cache file " + target.string());
    }
}

BlockSet BlockCache::get_or_build(const ValidatedConfig& cfg, double kappa, const SeriesOptions& options) {
    if (auto hit = load(cfg, kappa)) return std::move(*hit);
    BlockSet built = build_blocks(kappa, cfg, 0.0, options);
    store(cfg, built);
    return built;
}

std::vector<BlockCache::Entry> BlockCache::inspect() const {
    std::vector<Entry> out;
    std::error_code ec;
    if (!fs::is_directory(dir_, ec)) return out;
    for (const auto& de : fs::directory_iterator(dir_, ec)) {
        if (!de.is_regular_file() || de.path().extension() != ".flqb") continue;
        Entry e;
        e.path = de.path();
        e.bytes = de.file_size(ec);
        std::ifstream in(de.path(), std::ios::binary);
        try {
            const Header h = read_header(in, de.path());
            e.config_hash = h.hash;
            e.kappa = h.kappa;
            e.dim = static_cast<int>(h.dim);
            e.steps = static_cast<int>(h.steps);
            in.close();
            read_block_file(de.path(), h.hash);
            e.valid = true;
        } catch (const Error&) {
            e.valid = false;
        }
        out.push_back(e);
    }
    std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.path < b.path; });
    return out;
}

std::size_t BlockCache::clear() {
    std::size_t removed = 0;
    std::error_code ec;
    if (!fs::is_directory(dir_, ec)) return 0;
    for (const auto& de : fs::directory_iterator(dir_, ec)) {
        const auto ext = de.path().extension();
        const bool temp = de.path().filename().string().find(".flqb.tmp.") != std::string::npos;
        if (de.is_regular_file() && (ext == ".flqb" || temp) && fs::remove(de.path(), ec)) ++removed;
    }
    return removed;
}

}  // namespace floquet
