#pragma once

#include <cstdint>

namespace aeicp {

// splitmix64 step; also used to derive independent sub-seeds.
inline uint64_t splitmix64_next(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Mixes a stream index into a base seed (for per-problem substreams).
inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
  uint64_t s = base ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
  return splitmix64_next(s);
}

// xoshiro256++, seeded through splitmix64 expansion. Deterministic and
// portable: identical bits for identical seeds on every platform.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64_next(sm);
  }

  uint64_t next() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // [0,1) with 53-bit mantissa resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // [-1,1)
  double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

}  // namespace aeicp
