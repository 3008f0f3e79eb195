#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace edgealloc {

// mt19937_64 with hand-rolled output transforms. The engine is fully pinned by
// the standard and the transforms below avoid std::*_distribution, whose
// output differs between standard library implementations; results are
// therefore bit-identical everywhere for a given seed.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; consumes two uniforms per pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

  // splitmix64-based key mixing for derived, order-independent substreams.
  static uint64_t derive(std::initializer_list<uint64_t> keys) {
    uint64_t h = 0x9e3779b97f4a7c15ull;
    for (uint64_t k : keys) h = mix(h ^ mix(k));
    return h;
  }

 private:
  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace edgealloc
