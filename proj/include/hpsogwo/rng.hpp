#pragma once

#include <cstdint>
#include <random>

namespace hpsogwo {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. A bijection on 64-bit words, so distinct inputs
/// always give distinct outputs.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of substream `index` under `root`. Injective in `index` for a fixed
/// root.
constexpr std::uint64_t substream_seed(std::uint64_t root, std::uint64_t index) noexcept
{
    return mix64(mix64(root) + index);
}

inline Rng make_substream(std::uint64_t root, std::uint64_t index)
{
    return Rng(substream_seed(root, index));
}

/// Uniform draw in [0, 1).
inline double uniform01(Rng &rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

} // namespace hpsogwo
