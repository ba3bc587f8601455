#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "mednlu/error.hpp"

namespace mednlu::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// splitmix64 finalizer (Steele/Lea/Flood). Bijective 64-bit mixer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Order-dependent combination of two 64-bit values.
inline constexpr std::uint64_t combine(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ (b + kGolden + (a << 6) + (a >> 2)));
}

/// FNV-1a over bytes; stable across platforms.
inline constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Deterministic per-instance seed: independent of processing order.
inline constexpr std::uint64_t instance_seed(std::string_view dataset, std::string_view id,
                                             std::uint64_t global_seed) {
    return combine(combine(fnv1a64(dataset), fnv1a64(id)), global_seed);
}

/// i-th value of the splitmix64 stream for `seed`, computed directly so
/// callers can evaluate elements independently (and in parallel).
inline constexpr std::uint64_t stream_at(std::uint64_t seed, std::uint64_t i) {
    return mix64(seed + (i + 1) * kGolden);
}

/// Uniform double in [0, 1) from 64 random bits (top 53 bits used).
inline constexpr double unit_from_bits(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Counter-based splitmix64 stream.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix64(state_);
    }

    /// Uniform in [0, n) via rejection sampling; no modulo bias.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) fail(Errc::InvalidArgument, "next_below(0)");
        const std::uint64_t limit = ~0ULL - (~0ULL % n);
        std::uint64_t v = next();
        while (v >= limit) v = next();
        return v % n;
    }

    /// Uniform double in [0, 1) using the top 53 bits.
    double next_unit() { return unit_from_bits(next()); }

private:
    std::uint64_t state_;
};

/// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& v, SplitMix& g) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(g.next_below(i));
        using std::swap;
        swap(v[i - 1], v[j]);
    }
}

/// k distinct indices from [0, n), in draw order.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                           SplitMix& g) {
    if (k > n) fail(Errc::PoolTooSmall, "sample " + std::to_string(k) + " from " + std::to_string(n));
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(g.next_below(n - i));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    return out;
}

} // namespace mednlu::rng
