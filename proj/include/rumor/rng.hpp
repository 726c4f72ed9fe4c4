#pragma once

#include <cstdint>

namespace rumor {

/// xoshiro256** (Blackman & Vigna), seeded through splitmix64.  Chosen for
/// bit-reproducible streams across platforms given the same seed; the
/// standard <random> engines are portable but their distributions are not.
class Xoshiro256 {
 public:
  explicit Xoshiro256(uint64_t seed) {
    uint64_t x = seed;
    for (auto& word : s_) {  // splitmix64 expansion
      x += 0x9e3779b97f4a7c15ULL;
      uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      word = z ^ (z >> 31);
    }
  }

  uint64_t next() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0,1) with 53 random bits.
  double uniform() { return (next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) via Lemire's multiply-shift with
  /// rejection (unbiased).
  uint32_t below(uint32_t bound) {
    uint64_t m = static_cast<uint64_t>(static_cast<uint32_t>(next())) * bound;
    uint32_t lo = static_cast<uint32_t>(m);
    if (lo < bound) {
      const uint32_t floor = (0u - bound) % bound;
      while (lo < floor) {
        m = static_cast<uint64_t>(static_cast<uint32_t>(next())) * bound;
        lo = static_cast<uint32_t>(m);
      }
    }
    return static_cast<uint32_t>(m >> 32);
  }

 private:
  static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
  uint64_t s_[4];
};

}  // namespace rumor
