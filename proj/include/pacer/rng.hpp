/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cmath>
#include <cstdint>

namespace pacer {

// splitmix64; used both as a seed mixer and as a counter-based sample generator.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Deterministic combination of a seed with a stream/index discriminator.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ (0x9E3779B97F4A7C15ULL + (stream << 6) + (stream >> 2)));
}

/// Uniform in (0, 1]; never returns 0 so it is safe under log().
inline double unit_uniform(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// Counter-based standard normal draw: value n of the stream identified by seed.
/// Position-addressable, so a truncated re-simulation reproduces its prefix exactly.
inline double gaussian_at(std::uint64_t seed, std::uint64_t n) {
  const double u1 = unit_uniform(splitmix64(seed + 2 * n));
  const double u2 = unit_uniform(splitmix64(seed + 2 * n + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace pacer
