#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

// Stateless, counter-based random numbers. Every draw is a pure function of
// (seed, stream, index), so any partition of work across threads reproduces
// the same values bit for bit.

namespace krossfuse::rng {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
    const std::uint64_t key = mix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
    return mix64(key ^ mix64(index * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
    return static_cast<double>(bits(seed, stream, index) >> 11) * 0x1.0p-53;
}

/// Uniform on [lo, hi].
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index, double lo,
                      double hi) noexcept {
    return lo + (hi - lo) * uniform01(seed, stream, index);
}

/// Standard normal via Box-Muller on the counter pair (2*index, 2*index+1).
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
    const double u1 = 1.0 - uniform01(seed, stream, 2 * index);  // (0, 1]
    const double u2 = uniform01(seed, stream, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Independent child seed for trial `trial` of a harness driven by `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial) noexcept {
    return mix64(master ^ mix64(trial + 0x632be59bd9b4e019ULL));
}

}  // namespace krossfuse::rng
