#pragma once

#include <cstdint>

namespace advlab {

// SplitMix64: a 64-bit counter-based generator (Steele, Lea, Flood 2014).
// The state advances by a fixed odd constant, so stream position k is pure
// function of (seed, k); output is bitwise identical on every platform,
// which is what makes seeded batteries reproducible in reports.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, n), n > 0.  Simple multiply-shift; the tiny
  // modulo bias is irrelevant for test-instance generation.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(next_double() * static_cast<double>(n));
  }

 private:
  std::uint64_t state_;
};

// Derives an independent stream for a named sub-battery from a master seed.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t salt) {
  SplitMix64 mix(seed ^ (0x5851f42d4c957f2dull * (salt + 1)));
  mix.next_u64();  // decorrelate trivially related seeds
  return mix;
}

}  // namespace advlab
