#pragma once

// Test-only oracles, implemented independently of the library code paths
// they check (plain loops, std::mt19937, no shared helpers).  Expensive
// closed-form values are frozen as literals in the test files themselves;
// the functions here cover the cases where a live independent computation
// is more convincing than a constant.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using Vecd = std::vector<double>;

// ||x|| for the (weighted) p-norm computed the naive way.
inline double lp_norm(double p, const Vecd& w, const Vecd& x) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double wi = w.empty() ? 1.0 : w[i];
      m = std::max(m, wi * std::fabs(x[i]));
    }
    return m;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    s += wi * std::pow(std::fabs(x[i]), p);
  }
  return std::pow(s, 1.0 / p);
}

// Dual norm of a functional f estimated by maximizing <f, u> over a dense
// random sample of the primal unit sphere (coordinate refinement pass on
// the best candidate).  Accurate to ~1e-4 in 2-3 dimensions with the
// default budget, which is enough to cross-check closed forms.
inline double dense_dual_norm(double p, const Vecd& w, const Vecd& f,
                              int budget = 200000, unsigned seed = 9001) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  const std::size_t d = f.size();
  double best = 0.0;
  Vecd best_u(d, 0.0);
  for (int k = 0; k < budget; ++k) {
    Vecd u(d);
    for (std::size_t i = 0; i < d; ++i) u[i] = nd(gen);
    const double n = lp_norm(p, w, u);
    if (n <= 1e-12) continue;
    double pair = 0.0;
    for (std::size_t i = 0; i < d; ++i) pair += f[i] * u[i] / n;
    if (std::fabs(pair) > best) {
      best = std::fabs(pair);
      for (std::size_t i = 0; i < d; ++i) best_u[i] = u[i] / n * (pair < 0 ? -1.0 : 1.0);
    }
  }
  // Local coordinate refinement around the best direction.
  double step = 0.05;
  for (int round = 0; round < 60; ++round) {
    bool improved = false;
    for (std::size_t i = 0; i < d; ++i) {
      for (double sgn : {1.0, -1.0}) {
        Vecd u = best_u;
        u[i] += sgn * step;
        const double n = lp_norm(p, w, u);
        if (n <= 1e-12) continue;
        double pair = 0.0;
        for (std::size_t j = 0; j < d; ++j) pair += f[j] * u[j] / n;
        if (pair > best) {
          best = pair;
          for (std::size_t j = 0; j < d; ++j) best_u[j] = u[j] / n;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

// Min distance from x to the segment [c0, c1] by uniform sampling.
inline double segment_distance(const Vecd& c0, const Vecd& c1, const Vecd& x,
                               double p, const Vecd& w, int samples = 200000) {
  double best = std::numeric_limits<double>::infinity();
  Vecd diff(x.size());
  for (int k = 0; k <= samples; ++k) {
    const double t = static_cast<double>(k) / samples;
    for (std::size_t i = 0; i < x.size(); ++i)
      diff[i] = x[i] - ((1.0 - t) * c0[i] + t * c1[i]);
    best = std::min(best, lp_norm(p, w, diff));
  }
  return best;
}

}  // namespace oracle
