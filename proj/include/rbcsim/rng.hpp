#pragma once

#include <cstdint>

namespace rbcsim {

// SplitMix64 mixing step (Steele, Lea, Flood 2014). Bijective on uint64.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Splittable counter construction: injective in `index` for a fixed master
// seed. Stable across versions; golden values are pinned in the tests.
inline uint64_t derive_seed(uint64_t master_seed, uint64_t index) {
  uint64_t h = splitmix64(master_seed ^ 0x5851f42d4c957f2dULL);
  return splitmix64(h + index * 0x9e3779b97f4a7c15ULL);
}

// xoshiro256++ (Blackman, Vigna 2019). State seeded via SplitMix64 so a
// single 64-bit seed expands to a full nonzero state.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(uint64_t seed = 0) { reseed(seed); }

  void reseed(uint64_t seed) {
    uint64_t x = seed;
    for (auto& w : s_) {
      x = splitmix64(x);
      w = x;
    }
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

  // Uniform double in [0, 1), 53 significant bits, bit-stable across
  // platforms (std::uniform_real_distribution is not).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  using result_type = uint64_t;
  static constexpr uint64_t min() { return 0; }
  static constexpr uint64_t max() { return ~0ULL; }
  uint64_t operator()() { return next(); }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

}  // namespace rbcsim
