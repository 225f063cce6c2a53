#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>

#include "proxsweep/core.hpp"

namespace proxsweep {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

// Seed precedence: explicit value, then the SWEEP_SEED environment variable,
// then kDefaultSeed.
inline std::uint64_t env_seed() {
  if (const char* s = std::getenv("SWEEP_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 0);
    if (end != s && *end == '\0') return static_cast<std::uint64_t>(v);
  }
  return kDefaultSeed;
}

// Draws are derived from raw engine bits, never from <random> distribution
// objects, so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = kDefaultSeed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  // [0, 1), 53-bit resolution
  double uniform01() { return std::ldexp(static_cast<double>(gen_() >> 11), -53); }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // (0, 1], safe as a log argument
  double uniform_pos() {
    return std::ldexp(static_cast<double>((gen_() >> 11) + 1), -53);
  }

  // Box-Muller; consumes exactly two draws
  double normal() {
    double u1 = uniform_pos();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) % n;
  }

  Vec direction(int dim) {
    Vec d(dim);
    double n2 = 0.0;
    do {
      for (int i = 0; i < dim; ++i) d[i] = normal();
      n2 = d.squaredNorm();
    } while (n2 < 1e-300);
    return d / std::sqrt(n2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace proxsweep
