#pragma once

#include <cstdint>
#include <random>

namespace xcca {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of sub-stream `index` under `master`: splitmix64(splitmix64(master) ^ index).
/// Workers derive their own seeds, so no RNG state is shared between tasks.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ index);
}

using Rng = std::mt19937_64;

}  // namespace xcca
