#pragma once

// Finite-dimensional normed spaces: l^p, weighted l^p and the max norm,
// their duals, support functionals (norm-one functionals attaining the norm
// at a point), smoothness / strict-convexity probes and one-sided norm
// derivatives.  Everything that has a closed form uses it; finite
// differences only appear as cross-checks.

#include <optional>
#include <string>
#include <vector>

#include "chebylab/vec.hpp"

namespace chebylab {

enum class NormKind { Lp, WeightedLp, MaxNorm };

struct NormSpec {
  NormKind kind = NormKind::Lp;
  double p = 2.0;  // >= 1; infinity() encodes the sup norm
  Vec weights;     // WeightedLp only; strictly positive, size == dim
  int dim = 0;

  static NormSpec lp(double p, int dim);
  static NormSpec weighted_lp(double p, Vec weights);
  static NormSpec max_norm(int dim);

  bool is_inf() const;
  // q with 1/p + 1/q = 1 (inf for p = 1 and 1 for p = inf).
  double dual_exponent() const;
  bool operator==(const NormSpec&) const = default;
};

// Throws std::invalid_argument on p < 1, non-positive weights, dim < 1,
// weight/dim mismatch.
void validate(const NormSpec& spec);

double norm_value(const NormSpec& spec, const Vec& x);

// The dual of Lp(p) is Lp(q); the dual of WeightedLp(p, w) is
// WeightedLp(q, w^(1-q)) for finite p > 1, WeightedLp(inf, 1/w) for p = 1
// and WeightedLp(1, 1/w) for p = inf.  MaxNorm dualizes to Lp(1).
NormSpec dual_space(const NormSpec& spec);

double dual_norm_value(const NormSpec& spec, const Functional& f);

// All support functionals at x != 0 when the face is finite (extreme points
// for p in {1, inf}), or the unique one for 1 < p < inf.  Each returned f
// satisfies dual_norm_value(f) == 1 and pair(f, x) == norm_value(x) up to
// roundoff; this is verified internally.  Throws on x == 0.
std::vector<Functional> support_functionals(const NormSpec& spec, const Vec& x);

// Vectors of norm one where a functional attains its dual norm; computed as
// support functionals in the dual space.
std::vector<Vec> norming_vectors(const NormSpec& spec, const Functional& f);

struct SmoothnessReport {
  bool smooth = true;
  // Two support functionals further than tol apart in the dual norm, when
  // smoothness fails.
  std::optional<std::pair<Functional, Functional>> witnesses;
};

SmoothnessReport is_smooth_at(const NormSpec& spec, const Vec& x,
                              double tol = 1e-6);

struct RotundityReport {
  bool strictly_convex = false;  // analytic verdict (true iff 1 < p < inf)
  // Non-parallel unit pair with || x + y || == 2 (up to 1e-9) when the space
  // is not strictly convex.
  std::optional<std::pair<Vec, Vec>> witness;
  // Set when the sampling search contradicts the analytic verdict; the
  // verdict is still reported and the contradiction recorded, not thrown.
  bool contradiction = false;
};

RotundityReport is_strictly_convex(const NormSpec& spec, int samples = 500,
                                   std::uint64_t seed = 1);

bool dual_is_strictly_convex(const NormSpec& spec);

struct NormDerivative {
  bool exists = false;       // two-sided Gateaux derivative along y
  double value = 0.0;        // midpoint of left/right when they agree
  double left = 0.0;         // one-sided derivatives (exact, via the face)
  double right = 0.0;
  bool cross_check_ok = true;  // closed form vs central finite difference
};

// One-sided derivatives of t -> ||x + t y|| at t = 0 for x != 0.  right is
// the max of <f, y> over the support face, left the min; they are exact.
NormDerivative norm_gateaux_derivative(const NormSpec& spec, const Vec& x,
                                       const Vec& y, double tol = 1e-6);

std::string norm_label(const NormSpec& spec);

}  // namespace chebylab
