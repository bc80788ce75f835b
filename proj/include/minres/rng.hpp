#pragma once

// Seeded counter-based random stream. The i-th 64-bit output (i >= 1) is
//
//   mix(seed + i * 0x9E3779B97F4A7C15)
//
// where mix is the splitmix64 finalizer. Because each output depends only on
// (seed, i), streams are reproducible across platforms and languages; the
// exact constants are documented in the README.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace minres {

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw in (0, 1].
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (two uniforms per draw, no caching).
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

} // namespace minres
