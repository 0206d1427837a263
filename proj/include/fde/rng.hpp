#pragma once

// Seed derivation for reproducible, schedule-independent substreams.

#include <cstdint>
#include <random>

namespace fde {

// splitmix64 finalizer; decorrelates nearby seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent engine for a (seed, stream) pair. Streams index rows, units,
// or replications so that parallel generation stays deterministic.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL)));
}

// Uniform draw on the open interval (0,1); safe to feed into quantiles.
inline double uniform01(std::mt19937_64& rng) {
  // 53-bit mantissa, then nudge away from the endpoints
  double u = (rng() >> 11) * 0x1.0p-53;
  if (u <= 0.0) u = 0x1.0p-53;
  if (u >= 1.0) u = 1.0 - 0x1.0p-53;
  return u;
}

}  // namespace fde
