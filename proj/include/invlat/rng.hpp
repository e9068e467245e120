#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace invlat {

using Rng = std::mt19937_64;

/// Seed used when a run does not specify one.
inline constexpr std::uint64_t kDefaultSeed = 20151117;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream for (seed, name, index). Every randomised operation
/// derives its generator here so results do not depend on scheduling.
inline Rng make_stream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a over the stream name
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  const std::uint64_t s = splitmix64(splitmix64(seed ^ h) + index);
  return Rng(s);
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

}  // namespace invlat
