#pragma once

// Seed-derived independent RNG streams. Every sampling site takes an
// explicit engine; the Monte Carlo engine derives one stream per
// (frame-block, transmitter) so results do not depend on worker count.

#include <cstdint>
#include <random>

namespace cogfso::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_a,
                                 std::uint64_t stream_b = 0) {
  std::uint64_t s = splitmix64(seed ^ 0x5851f42d4c957f2dULL);
  s = splitmix64(s ^ stream_a);
  s = splitmix64(s ^ (stream_b + 0x9e3779b97f4a7c15ULL));
  return s;
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_a = 0,
                                   std::uint64_t stream_b = 0) {
  return std::mt19937_64(derive_seed(seed, stream_a, stream_b));
}

}  // namespace cogfso::rng
