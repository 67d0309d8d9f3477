#pragma once

#include <cstdint>

namespace pyramid {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// First output of a SplitMix64 generator whose state is `x`.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  std::uint64_t z = x + kGoldenGamma;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Child stream seed for run `run_index` of a sweep. Stable across releases:
// recorded seeds in old CSVs must keep reproducing their rows.
constexpr std::uint64_t derive_child_seed(std::uint64_t master_seed,
                                          std::uint64_t run_index) noexcept {
  return splitmix64(master_seed ^ (run_index * kGoldenGamma));
}

}  // namespace pyramid
