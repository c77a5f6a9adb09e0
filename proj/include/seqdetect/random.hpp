#pragma once

#include <cstdint>
#include <random>

namespace seqdetect {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based seed derivation: the seed of item `index` in stream
/// `stream` depends only on (master, stream, index), never on execution order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) noexcept
{
    return splitmix64(splitmix64(master ^ splitmix64(stream)) + index);
}

}  // namespace seqdetect
