#pragma once

#include <cstdint>
#include <random>

namespace zolab {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed of stream `index` under `master`. Depends only on the pair, so
// replicate i draws the same image however replicates are scheduled.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index ^ 0xD1B54A32D192ED03ULL));
}

using Engine = std::mt19937_64;

Engine make_engine(std::uint64_t seed);

}  // namespace zolab
