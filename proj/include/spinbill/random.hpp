#pragma once

#include <cstdint>
#include <random>

namespace spinbill {

/// Seed for realization `index` derived from `base_seed`.
///
/// splitmix64 finaliser applied to base + (index + 1) * golden-gamma. The
/// finaliser is a bijection on 64-bit words and the gamma is odd, so the map
/// is injective in `index` for a fixed base. The mixing constants are part of
/// the output format: changing them changes every reproduced run.
constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) noexcept
{
    std::uint64_t z = base_seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits of one 64-bit draw.
/// Used instead of std::uniform_real_distribution, whose output is not
/// specified bit-for-bit across standard libraries.
inline double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace spinbill
