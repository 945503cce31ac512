#pragma once

// Small deterministic RNG utilities. The standard <random> distributions are
// implementation-defined, so fixtures frozen into tests would not be portable
// across standard libraries; these are fully specified instead.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace hydrofcr {

inline uint64_t splitmix64_next(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Stateful generator for sequential draws.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() { return splitmix64_next(state_); }

  /// Uniform in (0, 1): never returns exactly 0 or 1.
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (no cached spare: two uniforms per draw).
  double gaussian() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  uint64_t state_;
};

/// Counter-addressable standard normal: independent of evaluation order, so
/// grid generation can be parallelized without changing the output.
inline double counter_gaussian(uint64_t seed, uint64_t counter) {
  uint64_t s = seed + counter * 0xD1B54A32D192ED03ULL;
  const uint64_t a = splitmix64_next(s);
  const uint64_t b = splitmix64_next(s);
  const double u1 = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = (static_cast<double>(b >> 11) + 0.5) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Order-independent hash of up to three doubles (bit patterns), used for
/// deterministic holdout splits.
inline uint64_t hash_coords(double a, double b, double c) {
  auto bits = [](double x) {
    uint64_t u;
    static_assert(sizeof(u) == sizeof(x));
    __builtin_memcpy(&u, &x, sizeof(u));
    return u;
  };
  uint64_t h = 0x8A5CD789635D2DFFULL;
  for (uint64_t v : {bits(a), bits(b), bits(c)}) {
    h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    h = splitmix64_next(h);
  }
  return h;
}

}  // namespace hydrofcr
