#pragma once

#include <cstdint>

namespace planarmvs {

// splitmix64 step; also used as the mixing function when deriving stream keys.
inline std::uint64_t splitmix64(std::uint64_t &state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic counter-free generator.  Every consumer derives its own
// stream from a key sequence (seed, image, phase, iteration, pixel, ...), so
// draws are independent of pixel visit order and worker count.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t key) : state_(key) {
    // Decorrelate trivially related keys (0, 1, 2, ...).
    state_ = splitmix64(state_);
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                  std::uint64_t c = 0, std::uint64_t d = 0) {
    std::uint64_t s = seed;
    std::uint64_t k = splitmix64(s);
    s ^= a + 0x9e3779b97f4a7c15ULL;
    k ^= splitmix64(s);
    s ^= b + 0xd1b54a32d192ed03ULL;
    k ^= splitmix64(s);
    s ^= c + 0x8cb92ba72f3d8dd7ULL;
    k ^= splitmix64(s);
    s ^= d + 0xaef17502108ef2d9ULL;
    k ^= splitmix64(s);
    return k;
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  std::uint64_t state_;
};

}  // namespace planarmvs
