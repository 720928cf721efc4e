#pragma once

#include <cstdint>
#include <random>

namespace qgossip {

/// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Independent stream keyed by (seed, stream index). Trials must never share
/// a stream and results must not depend on scheduling, so every consumer of
/// randomness derives its own stream through this function.
inline std::mt19937_64 derive_stream(std::uint64_t seed, std::uint64_t stream_index) {
  return std::mt19937_64(mix64(seed ^ mix64(stream_index)));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound), bound >= 1, rejection-sampled to avoid
/// modulo bias. std::uniform_int_distribution is unspecified across standard
/// library implementations; this is pinned.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

/// Uniform integer in [lo, hi], endpoints inclusive.
inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  const std::uint64_t span =
      static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + uniform_below(rng, span));
}

}  // namespace qgossip
