#pragma once

#include <cstdint>
#include <random>

namespace degroot {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// One round of the splitmix64 finaliser.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += kGoldenGamma;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of replica `index` under `master`: splitmix64(master ^ index * golden).
/// Every replica loop in the library derives its stream this way, so any
/// schedule of replicas over threads reproduces the same numbers.
constexpr std::uint64_t replica_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(master ^ (index * kGoldenGamma));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace degroot
