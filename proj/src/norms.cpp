#include "chebylab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chebylab/rng.hpp"
#include "chebylab/strfmt.hpp"

namespace chebylab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Coordinates below this are treated as exactly zero when enumerating faces.
constexpr double kZeroCoord = 1e-12;

double weight_at(const NormSpec& s, int i) {
  return s.kind == NormKind::WeightedLp ? s.weights[static_cast<std::size_t>(i)]
                                        : 1.0;
}

double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

}  // namespace

NormSpec NormSpec::lp(double p, int dim) {
  NormSpec s;
  s.kind = NormKind::Lp;
  s.p = p;
  s.dim = dim;
  validate(s);
  return s;
}

NormSpec NormSpec::weighted_lp(double p, Vec weights) {
  NormSpec s;
  s.kind = NormKind::WeightedLp;
  s.p = p;
  s.dim = dim_of(weights);
  s.weights = std::move(weights);
  validate(s);
  return s;
}

NormSpec NormSpec::max_norm(int dim) {
  NormSpec s;
  s.kind = NormKind::MaxNorm;
  s.p = kInf;
  s.dim = dim;
  validate(s);
  return s;
}

bool NormSpec::is_inf() const { return kind == NormKind::MaxNorm || std::isinf(p); }

double NormSpec::dual_exponent() const {
  if (is_inf()) return 1.0;
  if (p == 1.0) return kInf;
  return p / (p - 1.0);
}

void validate(const NormSpec& spec) {
  if (spec.dim < 1)
    throw std::invalid_argument("norm: dimension must be at least 1");
  if (std::isnan(spec.p) || (!spec.is_inf() && spec.p < 1.0))
    throw std::invalid_argument("norm: exponent p must satisfy p >= 1");
  if (spec.kind == NormKind::WeightedLp) {
    if (dim_of(spec.weights) != spec.dim)
      throw std::invalid_argument("norm: weight count must match dimension");
    for (double w : spec.weights)
      if (!(w > 0.0) || !std::isfinite(w))
        throw std::invalid_argument("norm: weights must be positive and finite");
  } else if (!spec.weights.empty()) {
    throw std::invalid_argument("norm: weights only allowed for weighted_lp");
  }
}

double norm_value(const NormSpec& spec, const Vec& x) {
  require_dim(x, spec.dim, "norm_value");
  require_finite(x, "norm_value");
  if (spec.is_inf()) {
    double m = 0.0;
    for (int i = 0; i < spec.dim; ++i)
      m = std::max(m, weight_at(spec, i) * std::abs(x[static_cast<std::size_t>(i)]));
    return m;
  }
  if (spec.p == 1.0) {
    double s = 0.0;
    for (int i = 0; i < spec.dim; ++i)
      s += weight_at(spec, i) * std::abs(x[static_cast<std::size_t>(i)]);
    return s;
  }
  if (spec.p == 2.0 && spec.kind != NormKind::WeightedLp) return l2(x);
  double s = 0.0;
  for (int i = 0; i < spec.dim; ++i)
    s += weight_at(spec, i) * std::pow(std::abs(x[static_cast<std::size_t>(i)]), spec.p);
  return std::pow(s, 1.0 / spec.p);
}

NormSpec dual_space(const NormSpec& spec) {
  validate(spec);
  double q = spec.dual_exponent();
  if (spec.kind != NormKind::WeightedLp) {
    return std::isinf(q) ? NormSpec::max_norm(spec.dim) : NormSpec::lp(q, spec.dim);
  }
  Vec w(static_cast<std::size_t>(spec.dim));
  for (int i = 0; i < spec.dim; ++i) {
    double wi = spec.weights[static_cast<std::size_t>(i)];
    if (spec.is_inf() || spec.p == 1.0)
      w[static_cast<std::size_t>(i)] = 1.0 / wi;
    else
      w[static_cast<std::size_t>(i)] = std::pow(wi, 1.0 - q);
  }
  return NormSpec::weighted_lp(q, std::move(w));
}

double dual_norm_value(const NormSpec& spec, const Functional& f) {
  return norm_value(dual_space(spec), f.coords);
}

std::vector<Functional> support_functionals(const NormSpec& spec, const Vec& x) {
  require_dim(x, spec.dim, "support_functionals");
  require_finite(x, "support_functionals");
  const double nx = norm_value(spec, x);
  if (nx <= 0.0)
    throw std::invalid_argument("support_functionals: undefined at the origin");

  std::vector<Functional> out;
  const int d = spec.dim;
  if (spec.is_inf()) {
    // Extreme points of the face: one per coordinate attaining the max.
    for (int i = 0; i < d; ++i) {
      double xi = x[static_cast<std::size_t>(i)];
      if (weight_at(spec, i) * std::abs(xi) >= nx * (1.0 - 1e-12)) {
        Functional f{Vec(static_cast<std::size_t>(d), 0.0)};
        f.coords[static_cast<std::size_t>(i)] = sgn(xi) * weight_at(spec, i);
        out.push_back(std::move(f));
      }
    }
  } else if (spec.p == 1.0) {
    // sign pattern on the support; every sign combination on zero
    // coordinates is an extreme point of the face.
    std::vector<int> zeros;
    Functional base{Vec(static_cast<std::size_t>(d), 0.0)};
    for (int i = 0; i < d; ++i) {
      double xi = x[static_cast<std::size_t>(i)];
      if (std::abs(xi) <= kZeroCoord)
        zeros.push_back(i);
      else
        base.coords[static_cast<std::size_t>(i)] = sgn(xi) * weight_at(spec, i);
    }
    const std::size_t combos = std::size_t{1} << zeros.size();
    for (std::size_t mask = 0; mask < combos; ++mask) {
      Functional f = base;
      for (std::size_t k = 0; k < zeros.size(); ++k) {
        double s = (mask >> k) & 1u ? -1.0 : 1.0;
        f.coords[static_cast<std::size_t>(zeros[k])] = s * weight_at(spec, zeros[k]);
      }
      out.push_back(std::move(f));
    }
  } else {
    Functional f{Vec(static_cast<std::size_t>(d), 0.0)};
    const double scale = std::pow(nx, spec.p - 1.0);
    for (int i = 0; i < d; ++i) {
      double xi = x[static_cast<std::size_t>(i)];
      if (std::abs(xi) <= 0.0) continue;
      f.coords[static_cast<std::size_t>(i)] =
          weight_at(spec, i) * sgn(xi) * std::pow(std::abs(xi), spec.p - 1.0) / scale;
    }
    out.push_back(std::move(f));
  }

  // Closed forms, so failures here are bugs, not conditioning.
  for (const Functional& f : out) {
    if (std::abs(dual_norm_value(spec, f) - 1.0) > 1e-8 ||
        std::abs(pair(f, x) - nx) > 1e-8 * (1.0 + nx))
      throw SolverError("support_functionals: internal consistency check failed");
  }
  return out;
}

std::vector<Vec> norming_vectors(const NormSpec& spec, const Functional& f) {
  std::vector<Functional> fs = support_functionals(dual_space(spec), f.coords);
  std::vector<Vec> out;
  out.reserve(fs.size());
  for (Functional& g : fs) out.push_back(std::move(g.coords));
  return out;
}

SmoothnessReport is_smooth_at(const NormSpec& spec, const Vec& x, double tol) {
  std::vector<Functional> fs = support_functionals(spec, x);
  SmoothnessReport rep;
  double diam = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t j = i + 1; j < fs.size(); ++j) {
      double dist = dual_norm_value(spec, Functional{sub(fs[i].coords, fs[j].coords)});
      if (dist > diam) {
        diam = dist;
        if (dist > tol) rep.witnesses = {fs[i], fs[j]};
      }
    }
  }
  rep.smooth = diam <= tol;
  if (rep.smooth) rep.witnesses.reset();
  return rep;
}

RotundityReport is_strictly_convex(const NormSpec& spec, int samples,
                                   std::uint64_t seed) {
  validate(spec);
  RotundityReport rep;
  rep.strictly_convex = spec.dim == 1 || (!spec.is_inf() && spec.p > 1.0);

  if (!rep.strictly_convex) {
    // Closed-form witness: unit vectors with disjoint / aligned supports give
    // triangle equality for p = 1 / p = inf.
    Vec x(static_cast<std::size_t>(spec.dim), 0.0);
    Vec y(static_cast<std::size_t>(spec.dim), 0.0);
    if (spec.p == 1.0 && !spec.is_inf()) {
      x[0] = 1.0 / weight_at(spec, 0);
      y[1] = 1.0 / weight_at(spec, 1);
    } else {
      x[0] = 1.0 / weight_at(spec, 0);
      x[1] = 1.0 / weight_at(spec, 1);
      y[0] = 1.0 / weight_at(spec, 0);
      y[1] = -1.0 / weight_at(spec, 1);
    }
    rep.witness = {x, y};
  }

  // Sampling falsification: look for non-parallel unit pairs with
  // || x + y || = 2.  Near-parallel pairs are skipped so roundoff cannot
  // fake a witness in a rotund space.
  bool found = false;
  std::pair<Vec, Vec> found_pair;
  RngStream rng(seed, "norms.rotundity");
  for (int k = 0; k < samples && spec.dim >= 2; ++k) {
    Vec u(static_cast<std::size_t>(spec.dim)), v(static_cast<std::size_t>(spec.dim));
    for (int i = 0; i < spec.dim; ++i) {
      u[static_cast<std::size_t>(i)] = rng.uniform(-1.0, 1.0);
      v[static_cast<std::size_t>(i)] = rng.uniform(-1.0, 1.0);
    }
    double nu = norm_value(spec, u), nv = norm_value(spec, v);
    if (nu < 1e-6 || nv < 1e-6) continue;
    u = scaled(u, 1.0 / nu);
    v = scaled(v, 1.0 / nv);
    double cu = l2(u), cv = l2(v);
    if (std::abs(dot(u, v)) > (1.0 - 1e-6) * cu * cv) continue;
    if (norm_value(spec, add(u, v)) >= 2.0 - 1e-9) {
      found = true;
      found_pair = {u, v};
      break;
    }
  }
  if (found) {
    if (rep.strictly_convex)
      rep.contradiction = true;  // analytic verdict stands; recorded, not thrown
    rep.witness = found_pair;
  }
  return rep;
}

bool dual_is_strictly_convex(const NormSpec& spec) {
  double q = dual_space(spec).p;
  return spec.dim == 1 || (std::isfinite(q) && q > 1.0);
}

NormDerivative norm_gateaux_derivative(const NormSpec& spec, const Vec& x,
                                       const Vec& y, double tol) {
  require_dim(y, spec.dim, "norm_gateaux_derivative");
  require_finite(y, "norm_gateaux_derivative");
  std::vector<Functional> fs = support_functionals(spec, x);  // throws at 0

  NormDerivative d;
  double lo = kInf, hi = -kInf;
  for (const Functional& f : fs) {
    double v = pair(f, y);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  d.left = lo;
  d.right = hi;
  d.exists = (hi - lo) <= tol;
  d.value = 0.5 * (lo + hi);

  // Finite-difference cross-check.  The closed form is exact; the FD side
  // can be polluted by large higher derivatives near coordinate hyperplanes,
  // hence the generous acceptance threshold.
  auto phi = [&](double t) { return norm_value(spec, axpy(x, t, y)); };
  if (d.exists) {
    double best = kInf;
    for (double h : {1e-4, 1e-5, 1e-6})
      best = std::min(best, std::abs((phi(h) - phi(-h)) / (2.0 * h) - d.value));
    d.cross_check_ok = best <= 1e-4 * (1.0 + std::abs(d.value));
  } else {
    double r = (phi(1e-6) - phi(0.0)) / 1e-6;
    double l = (phi(0.0) - phi(-1e-6)) / 1e-6;
    d.cross_check_ok = std::abs(r - d.right) <= 1e-4 * (1.0 + std::abs(d.right)) &&
                       std::abs(l - d.left) <= 1e-4 * (1.0 + std::abs(d.left));
  }
  return d;
}

std::string norm_label(const NormSpec& spec) {
  auto pstr = [&] { return spec.is_inf() ? std::string("inf") : format_double(spec.p); };
  switch (spec.kind) {
    case NormKind::Lp:
      return "Lp(" + pstr() + ")";
    case NormKind::MaxNorm:
      return "MaxNorm(" + std::to_string(spec.dim) + ")";
    case NormKind::WeightedLp: {
      std::string s = "WeightedLp(" + pstr() + ", [";
      for (std::size_t i = 0; i < spec.weights.size(); ++i) {
        if (i) s += ", ";
        s += format_double(spec.weights[i]);
      }
      return s + "])";
    }
  }
  return "?";
}

}  // namespace chebylab
