#pragma once

// Plain dense vectors and linear functionals on R^n.  Everything in this
// project is finite dimensional, so a functional is just its coefficient
// vector and the pairing is a dot product.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace chebylab {

using Vec = std::vector<double>;

struct Functional {
  Vec coords;
};

// Thrown when an iterative solver cannot certify its result.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline int dim_of(const Vec& v) { return static_cast<int>(v.size()); }

inline bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline void require_dim(const Vec& v, int dim, const char* what) {
  if (dim_of(v) != dim)
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(dim) + ", got " +
                                std::to_string(dim_of(v)));
}

inline void require_finite(const Vec& v, const char* what) {
  if (!all_finite(v))
    throw std::invalid_argument(std::string(what) + ": non-finite coordinate");
}

inline double pair(const Functional& f, const Vec& x) {
  if (f.coords.size() != x.size())
    throw std::invalid_argument("pair: functional/vector dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += f.coords[i] * x[i];
  return s;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Vec add(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec scaled(const Vec& a, double s) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

// a + t*d without forming temporaries twice; the workhorse of every
// difference-quotient in the analysis module.
inline Vec axpy(const Vec& a, double t, const Vec& d) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + t * d[i];
  return r;
}

inline double l2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double linf_dist(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline Vec basis_vec(int dim, int i) {
  Vec e(dim, 0.0);
  e[i] = 1.0;
  return e;
}

}  // namespace chebylab
