#pragma once

// Seeded randomness. The engine is std::mt19937_64, whose output sequence is
// fixed by the standard; the uniform and normal transforms are written out
// here rather than taken from <random> so sampled states are bit-identical
// across standard library implementations.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "entmono/linalg.hpp"

namespace entmono {

using Seed = std::uint64_t;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-sample / per-restart seed derived from a master seed.
inline Seed derive_seed(Seed master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

class Rng {
 public:
  explicit Rng(Seed seed = 0) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  cplx complex_normal() {
    const double re = normal();
    return {re, normal()};
  }

  Rng split(std::uint64_t index) { return Rng(derive_seed(next(), index)); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace entmono
