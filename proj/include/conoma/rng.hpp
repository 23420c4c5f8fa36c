// Deterministic RNG streams for reproducible Monte Carlo.
//
// Each simulation chunk owns an independent generator whose seed is derived
// from (master seed, grid point index, chunk index). Serial and parallel
// executions therefore consume identical streams regardless of scheduling,
// and a shorter run's draws are a prefix of a longer run's draws.

#pragma once

#include <cmath>
#include <cstdint>

namespace conoma {

// splitmix64 finalizer (Steele/Lea/Flood). Used for seed mixing only.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ (Blackman/Vigna, public domain reference implementation).
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) {
      s = splitmix64_mix(s);
      w = s;
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on (0, 1]; never returns 0 so -log(u) is always finite.
  double uniform01() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  // Unit-mean exponential draw.
  double exponential() { return -std::log(uniform01()); }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

// Stream seed for a (grid point, chunk) pair under a master seed.
constexpr std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                           std::uint64_t point_index,
                                           std::uint64_t chunk_index) {
  std::uint64_t h = splitmix64_mix(master_seed);
  h = splitmix64_mix(h ^ (0xa0761d6478bd642fULL + point_index));
  h = splitmix64_mix(h ^ (0xe7037ed1a0b428dbULL + chunk_index));
  return h;
}

}  // namespace conoma
