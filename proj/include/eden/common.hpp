#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace eden {

// Error taxonomy shared by all modules. `code` maps onto CLI exit codes:
// config/usage errors exit 2, resource/cap/budget errors exit 3.
enum class Errc {
    invalid_element,
    budget_exceeded,
    variant_mismatch,
    out_of_window,
    unreachable,
    oracle_budget,
    saturated,
    coupling_invalid,
    domain_error,
    config_error,
    cap_violation,
    model_bug,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

// Canonical byte encodings. All multi-byte integers are little-endian so
// keys are identical across platforms.
using ByteKey = std::vector<std::uint8_t>;

inline void put_u32(ByteKey& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

inline void put_i64(ByteKey& out, std::int64_t v) {
    auto u = static_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

// 64-bit mixing primitives. splitmix64 is bijective, which keeps derived
// seeds injective in the replica index.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t content_hash(const ByteKey& bytes) {
    // FNV over the bytes, then a finalizer pass so nearby keys decorrelate.
    return splitmix64(splitmix64(fnv1a64(bytes.data(), bytes.size())));
}

// Uniform double in [0,1) from 64 bits; 53-bit mantissa, never returns 1.
inline double u01_from_bits(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
    return splitmix64(base_seed + 0x9e3779b97f4a7c15ULL * (index + 1));
}

// Small deterministic counter stream, used where a sequential RNG is wanted
// (Eden chain sampling). Distinct key domain from the weight field.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(splitmix64(seed ^ 0x45444e43484e4b31ULL)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Unbiased bounded sample by rejection; deterministic given the stream.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) fail(Errc::domain_error, "next_below: bound must be positive");
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    double next_u01() { return u01_from_bits(next_u64()); }

private:
    std::uint64_t state_;
};

}  // namespace eden
