// Seeded random streams with platform-stable sampling.  The normal sampler is
// a Marsaglia polar transform on top of mt19937_64 so panels are bit-identical
// across standard library implementations.

#pragma once

#include "agmm/types.hpp"

#include <cstdint>
#include <random>

namespace agmm {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // splitmix64-style avalanche; used to derive independent per-task streams.
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix(mix(a, b), c);
  }

  double uniform() {
    return (engine_() >> 11) * 0x1.0p-53;  // [0,1)
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double x, y, s;
    do {
      x = 2.0 * uniform() - 1.0;
      y = 2.0 * uniform() - 1.0;
      s = x * x + y * y;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = y * f;
    have_spare_ = true;
    return x * f;
  }

  Vector normal_vector(int n) {
    Vector out(n);
    for (int i = 0; i < n; ++i) out[i] = normal();
    return out;
  }

  // integer in [0, n)
  int index(int n) { return static_cast<int>(uniform() * n) % n; }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace agmm
