#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace wmark {

// Deterministic draws on top of mt19937_64. The standard distributions are
// implementation-defined, so the bench would not reproduce across standard
// libraries; these helpers pin the exact bit streams.

/// Unbiased integer in [0, bound) via rejection sampling.
inline std::uint64_t uniform_below(std::mt19937_64& g, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = g();
        if (r >= threshold) return r % bound;
    }
}

/// Uniform double in (0, 1], 53-bit resolution.
inline double uniform_unit(std::mt19937_64& g) {
    return (static_cast<double>(g() >> 11) + 1.0) * 0x1.0p-53;
}

/// Standard normal deviate (Box-Muller, cosine branch; two draws per call).
inline double gaussian(std::mt19937_64& g) {
    const double u1 = uniform_unit(g);
    const double u2 = uniform_unit(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace wmark
