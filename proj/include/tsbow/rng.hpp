#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace tsbow {

// splitmix64 finalizer; derives independent stream seeds from (seed, salt)
// so parallel folds / sweep points get decorrelated, reproducible streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt = 0) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t salt = 0) {
    return std::mt19937_64(mix_seed(seed, salt));
}

// Uniform integer in [0, n). Rejection sampling on the raw engine output,
// so results do not depend on the standard library's distribution internals.
inline std::uint64_t bounded_uint(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t threshold = -n % n; // 2^64 mod n
    for (;;) {
        std::uint64_t v = rng();
        if (v >= threshold) return v % n;
    }
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// In-place Fisher-Yates shuffle driven by bounded_uint.
template <typename T>
void shuffle(std::span<T> items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(bounded_uint(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace tsbow
