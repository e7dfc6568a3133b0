#pragma once

// Deterministic named-stream RNG.  Every sampling site in the project draws
// from RngStream(seed, "module.site", index) so results do not depend on
// thread schedule or on the order in which unrelated features consume
// randomness.  splitmix64 core, FNV-1a for the stream name.

#include <cstdint>
#include <string_view>

#include "chebylab/vec.hpp"

namespace chebylab {

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a offset basis
    for (char c : stream) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    state_ = mix(seed ^ h);
    state_ = mix(state_ + index * 0x9E3779B97F4A7C15ull);
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double normal() {
    // Box-Muller; one value per call keeps the stream layout simple.
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  Vec box_point(const Vec& lo, const Vec& hi) {
    Vec p(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) p[i] = uniform(lo[i], hi[i]);
    return p;
  }

  // Uniform direction on the euclidean unit sphere.
  Vec unit_l2(int dim) {
    while (true) {
      Vec v(dim);
      for (int i = 0; i < dim; ++i) v[i] = normal();
      double n = l2(v);
      if (n > 1e-12) return scaled(v, 1.0 / n);
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace chebylab
