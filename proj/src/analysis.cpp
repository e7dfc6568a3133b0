#include "chebylab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "chebylab/rng.hpp"

namespace chebylab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class TailMode { Lower, Upper, Two };

LimitEstimate tail_estimate(const std::function<double(double)>& quotient,
                            const TSequence& seq, double limit_tol,
                            TailMode mode) {
  LimitEstimate est;
  est.quotients.reserve(static_cast<std::size_t>(seq.count));
  for (double t : seq.values()) est.quotients.push_back(quotient(t));
  const int tail = std::min(seq.tail, seq.count);
  est.tail_min = kInf;
  est.tail_max = -kInf;
  bool finite = true;
  for (int k = seq.count - tail; k < seq.count; ++k) {
    double q = est.quotients[static_cast<std::size_t>(k)];
    if (!std::isfinite(q)) finite = false;
    est.tail_min = std::min(est.tail_min, q);
    est.tail_max = std::max(est.tail_max, q);
  }
  est.converged = finite && (est.tail_max - est.tail_min) <= limit_tol;
  switch (mode) {
    case TailMode::Lower: est.value = est.tail_min; break;
    case TailMode::Upper: est.value = est.tail_max; break;
    case TailMode::Two: est.value = 0.5 * (est.tail_min + est.tail_max); break;
  }
  return est;
}

// Central-difference derivative along e_i with step refinement; picks the
// best-agreeing consecutive pair of steps.
double central_derivative(const ScalarField& phi, const Vec& x, int i) {
  const double steps[3] = {1e-4, 1e-5, 1e-6};
  double prev = 0.0, best = 0.0, best_gap = kInf;
  for (int k = 0; k < 3; ++k) {
    Vec xp = x, xm = x;
    xp[static_cast<std::size_t>(i)] += steps[k];
    xm[static_cast<std::size_t>(i)] -= steps[k];
    double c = (phi.eval(xp) - phi.eval(xm)) / (2.0 * steps[k]);
    if (k > 0 && std::abs(c - prev) < best_gap) {
      best_gap = std::abs(c - prev);
      best = c;
    }
    prev = c;
  }
  return best;
}

bool is_basis_dir(const Vec& dir, int i) {
  for (int j = 0; j < dim_of(dir); ++j) {
    double want = j == i ? 1.0 : 0.0;
    if (dir[static_cast<std::size_t>(j)] != want) return false;
  }
  return true;
}

}  // namespace

std::vector<double> TSequence::values() const {
  std::vector<double> ts;
  ts.reserve(static_cast<std::size_t>(count));
  double t = t0;
  for (int k = 0; k < count; ++k) {
    ts.push_back(t);
    t *= ratio;
  }
  return ts;
}

ScalarField distance_field(const SetSpec& set, const NormSpec& space) {
  validate(space);
  const int d = validate_set(set);
  if (d != space.dim)
    throw std::invalid_argument("distance_field: set/space dimension mismatch");
  auto shared = std::make_shared<const SetSpec>(set);
  auto sp = std::make_shared<const NormSpec>(space);
  ScalarField f;
  f.eval = [shared, sp](const Vec& v) { return distance(*shared, v, *sp).distance; };
  f.dim = d;
  f.lipschitz_hint = 1.0;
  f.label = "dist[" + set_label(set) + ", " + norm_label(space) + "]";
  return f;
}

ScalarField norm_field(const NormSpec& space) {
  validate(space);
  auto sp = std::make_shared<const NormSpec>(space);
  ScalarField f;
  f.eval = [sp](const Vec& v) { return norm_value(*sp, v); };
  f.dim = space.dim;
  f.lipschitz_hint = 0.0;
  f.label = norm_label(space);
  return f;
}

ScalarField oscillation_field(int dim) {
  if (dim < 1) throw std::invalid_argument("oscillation_field: dim >= 1");
  ScalarField f;
  f.eval = [](const Vec& v) {
    return v[0] == 0.0 ? 0.0 : 1.0 + std::sin(1.0 / v[0]);
  };
  f.dim = dim;
  f.label = "1+sin(1/v0)";
  return f;
}

LimitEstimate dini_lower(const ScalarField& phi, const Vec& x, const Vec& y,
                         const AnalysisOptions& opts) {
  require_dim(x, phi.dim, "dini_lower");
  require_dim(y, phi.dim, "dini_lower");
  const double phix = phi.eval(x);
  return tail_estimate(
      [&](double t) { return (phi.eval(axpy(x, t, y)) - phix) / t; }, opts.seq,
      opts.limit_tol, TailMode::Lower);
}

LimitEstimate dini_upper(const ScalarField& phi, const Vec& x, const Vec& y,
                         const AnalysisOptions& opts) {
  require_dim(x, phi.dim, "dini_upper");
  require_dim(y, phi.dim, "dini_upper");
  const double phix = phi.eval(x);
  return tail_estimate(
      [&](double t) { return (phi.eval(axpy(x, t, y)) - phix) / t; }, opts.seq,
      opts.limit_tol, TailMode::Upper);
}

GateauxProbe gateaux_derivative_probe(const ScalarField& phi, const Vec& x,
                                      const std::vector<Vec>& directions,
                                      const AnalysisOptions& opts) {
  const int d = phi.dim;
  require_dim(x, d, "gateaux_derivative_probe");
  if (static_cast<int>(directions.size()) < d)
    throw std::invalid_argument(
        "gateaux_derivative_probe: directions must start with the standard basis");
  for (int i = 0; i < d; ++i)
    if (!is_basis_dir(directions[static_cast<std::size_t>(i)], i))
      throw std::invalid_argument(
          "gateaux_derivative_probe: directions must start with the standard basis");

  GateauxProbe probe;
  const double phix = phi.eval(x);
  bool all_exist = true;
  for (const Vec& y : directions) {
    require_dim(y, d, "gateaux_derivative_probe");
    DirectionalRecord rec;
    rec.dir = y;
    rec.forward = tail_estimate(
        [&](double t) { return (phi.eval(axpy(x, t, y)) - phix) / t; }, opts.seq,
        opts.limit_tol, TailMode::Two);
    rec.backward = tail_estimate(
        [&](double t) { return (phix - phi.eval(axpy(x, -t, y))) / t; }, opts.seq,
        opts.limit_tol, TailMode::Two);
    rec.exists = rec.forward.converged && rec.backward.converged &&
                 std::abs(rec.forward.value - rec.backward.value) <=
                     3.0 * opts.limit_tol;
    rec.value = 0.5 * (rec.forward.value + rec.backward.value);
    if (!rec.exists && all_exist) {
      all_exist = false;
      probe.witness = y;
    }
    probe.records.push_back(std::move(rec));
  }
  probe.exists = all_exist;
  if (!probe.exists) return probe;

  // Fit the gradient by refined central differences along the basis (more
  // accurate than the tail midpoints), then check linearity on the extras.
  probe.gradient = Vec(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < d; ++i)
    probe.gradient[static_cast<std::size_t>(i)] = central_derivative(phi, x, i);
  for (std::size_t j = static_cast<std::size_t>(d); j < directions.size(); ++j) {
    double lin = std::abs(dot(probe.gradient, directions[j]) - probe.records[j].value);
    probe.linearity_error = std::max(probe.linearity_error, lin);
  }
  return probe;
}

SubdifferentialCheck subdifferential_check(const ScalarField& phi, const Vec& x,
                                           const Functional& candidate,
                                           const std::vector<Vec>& sample) {
  require_dim(x, phi.dim, "subdifferential_check");
  require_dim(candidate.coords, phi.dim, "subdifferential_check");
  SubdifferentialCheck out;
  out.max_violation = -kInf;
  const double phix = phi.eval(x);
  for (const Vec& y : sample) {
    double v = phix + pair(candidate, sub(y, x)) - phi.eval(y);
    if (v > out.max_violation) {
      out.max_violation = v;
      out.worst_y = y;
    }
  }
  if (sample.empty()) out.max_violation = 0.0;
  return out;
}

SubdifferentialProbe singleton_subdifferential_probe(
    const ScalarField& phi, const Vec& x, const NormSpec& space, int budget,
    std::uint64_t seed, const AnalysisOptions& opts,
    const std::vector<Vec>& extra_sample) {
  const int d = phi.dim;
  require_dim(x, d, "singleton_subdifferential_probe");
  SubdifferentialProbe out;

  std::vector<Vec> dirs;
  for (int i = 0; i < d; ++i) dirs.push_back(basis_vec(d, i));
  {
    RngStream rng(seed, "analysis.subdiff.dirs");
    for (int k = 0; k < 4; ++k) dirs.push_back(rng.unit_l2(d));
  }
  out.probe = gateaux_derivative_probe(phi, x, dirs, opts);

  // Candidate functionals.
  std::vector<Functional> cands;
  if (out.probe.exists) {
    cands.push_back(Functional{out.probe.gradient});
  } else {
    // One-sided values per coordinate; kink coordinates branch left/right.
    std::vector<int> kinks;
    Vec base(static_cast<std::size_t>(d), 0.0);
    bool usable = true;
    for (int i = 0; i < d; ++i) {
      const DirectionalRecord& rec = out.probe.records[static_cast<std::size_t>(i)];
      if (!rec.forward.converged || !rec.backward.converged) {
        usable = false;  // no one-sided derivative either; no candidates
        break;
      }
      if (std::abs(rec.forward.value - rec.backward.value) <= 3.0 * opts.limit_tol)
        base[static_cast<std::size_t>(i)] = rec.value;
      else
        kinks.push_back(i);
    }
    if (usable) {
      const std::size_t combos = std::size_t{1} << kinks.size();
      for (std::size_t mask = 0; mask < combos; ++mask) {
        if (static_cast<int>(cands.size()) >= budget) break;
        Functional f{base};
        for (std::size_t k = 0; k < kinks.size(); ++k) {
          const DirectionalRecord& rec =
              out.probe.records[static_cast<std::size_t>(kinks[k])];
          f.coords[static_cast<std::size_t>(kinks[k])] =
              (mask >> k) & 1u ? rec.backward.value : rec.forward.value;
        }
        cands.push_back(std::move(f));
      }
    }
  }

  // Sample points for the subgradient inequality.
  std::vector<Vec> sample;
  RngStream rng(seed, "analysis.subdiff.sample");
  for (int k = 0; k < 200; ++k) {
    double r = 10.0 * std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
    sample.push_back(axpy(x, r, rng.unit_l2(d)));
  }
  for (const Vec& v : extra_sample) sample.push_back(v);

  for (const Functional& f : cands) {
    SubdifferentialCheck chk = subdifferential_check(phi, x, f, sample);
    if (chk.max_violation > opts.sub_tol) continue;
    bool dup = false;
    for (const Functional& g : out.candidates)
      if (dual_norm_value(space, Functional{sub(f.coords, g.coords)}) <= 1e-6) {
        dup = true;
        break;
      }
    if (!dup) {
      out.candidates.push_back(f);
      out.violations.push_back(std::max(chk.max_violation, 0.0));
    }
  }
  out.verdict = out.candidates.empty()      ? SubdiffVerdict::Empty
                : out.candidates.size() == 1 ? SubdiffVerdict::Singleton
                                             : SubdiffVerdict::Multiple;
  return out;
}

LimitEstimate upper_slope_envelope_estimate(const ScalarField& phi, const Vec& x,
                                            const NormSpec& space, int y_samples,
                                            int z_samples, double z_radius,
                                            std::uint64_t seed,
                                            const AnalysisOptions& opts) {
  require_dim(x, phi.dim, "upper_slope_envelope_estimate");
  if (y_samples < 1 || z_samples < 1)
    throw std::invalid_argument("upper_slope_envelope_estimate: empty budgets");
  const int d = phi.dim;

  std::vector<Vec> ys;
  {
    RngStream rng(seed, "analysis.envelope.y");
    for (int k = 0; k < y_samples; ++k) {
      Vec u = rng.unit_l2(d);
      ys.push_back(scaled(u, 1.0 / norm_value(space, u)));  // unit in the norm
    }
  }
  std::vector<Vec> zs;
  zs.push_back(Vec(static_cast<std::size_t>(d), 0.0));  // z = 0 always probed
  {
    RngStream rng(seed, "analysis.envelope.z");
    for (int k = 1; k < z_samples; ++k) {
      double r = z_radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
      zs.push_back(scaled(rng.unit_l2(d), r));
    }
  }

  // sup over nested prefixes of the sample; the t-limsup per pair reuses the
  // tail machinery.
  std::vector<std::vector<double>> pair_sup(
      ys.size(), std::vector<double>(zs.size(), -kInf));
  for (std::size_t iy = 0; iy < ys.size(); ++iy) {
    for (std::size_t iz = 0; iz < zs.size(); ++iz) {
      LimitEstimate e = tail_estimate(
          [&](double t) {
            Vec base = axpy(x, t, zs[iz]);
            return (phi.eval(axpy(base, t, ys[iy])) - phi.eval(base)) / t;
          },
          opts.seq, opts.limit_tol, TailMode::Upper);
      pair_sup[iy][iz] = e.value;
    }
  }
  auto prefix_sup = [&](std::size_t ny, std::size_t nz) {
    double s = -kInf;
    for (std::size_t iy = 0; iy < ny; ++iy)
      for (std::size_t iz = 0; iz < nz; ++iz) s = std::max(s, pair_sup[iy][iz]);
    return s;
  };
  const std::size_t ny = ys.size(), nz = zs.size();
  LimitEstimate est;
  double full = prefix_sup(ny, nz);
  double half = prefix_sup(std::max<std::size_t>(1, ny / 2), std::max<std::size_t>(1, nz / 2));
  double quarter =
      prefix_sup(std::max<std::size_t>(1, ny / 4), std::max<std::size_t>(1, nz / 4));
  est.value = full;
  est.tail_min = quarter;
  est.tail_max = full;
  est.converged = std::isfinite(full) && (full - half) <= opts.limit_tol;
  est.quotients = {quarter, half, full};
  return est;
}

SupportIdentityResult support_identity_check(const SetSpec& set,
                                             const NormSpec& space, const Vec& x,
                                             const std::vector<Vec>& directions,
                                             const AnalysisOptions& opts) {
  SupportIdentityResult out;
  NearestPointResult near = distance(set, x, space);
  if (near.distance <= 1e-12) {
    out.note = "x lies in the set";
    return out;
  }
  if (near.cluster_count != 1) {
    out.note = "nearest point is not unique";
    return out;
  }
  const Vec gap = sub(x, near.minimizers[0]);
  if (!is_smooth_at(space, gap).smooth) {
    out.note = "norm is not smooth at x - xbar";
    return out;
  }
  ScalarField dfield = distance_field(set, space);
  std::vector<Vec> dirs;
  for (int i = 0; i < space.dim; ++i) dirs.push_back(basis_vec(space.dim, i));
  for (const Vec& y : directions) dirs.push_back(y);
  GateauxProbe probe = gateaux_derivative_probe(dfield, x, dirs, opts);
  if (!probe.exists) {
    out.note = "distance field not differentiable at x";
    return out;
  }
  out.preconditions_ok = true;
  out.support = support_functionals(space, gap)[0];
  out.gradient = probe.gradient;
  for (const Vec& y : dirs) {
    double diff = std::abs(dot(probe.gradient, y) - pair(out.support, y));
    out.discrepancy = std::max(out.discrepancy, diff);
  }
  return out;
}

RayLimitResult ray_limit_differentiability_check(const SetSpec& set,
                                                 const NormSpec& space,
                                                 const Vec& x, std::uint64_t seed,
                                                 const AnalysisOptions& opts) {
  RayLimitResult out;
  NearestPointResult near = distance(set, x, space);
  const double d = near.distance;
  if (d <= 1e-12) {
    out.note = "x lies in the set";
    return out;
  }
  const Vec xbar = near.minimizers[0];  // any nearest point qualifies
  const Vec gap = sub(x, xbar);
  if (!is_smooth_at(space, gap).smooth) {
    out.note = "norm is not smooth at x - xbar";
    return out;
  }
  out.preconditions_ok = true;

  ScalarField dfield = distance_field(set, space);
  LimitEstimate fwd = dini_lower(dfield, x, gap, opts);
  out.hypothesis_gap = std::abs(fwd.value - d);
  out.hypothesis_holds =
      fwd.converged && out.hypothesis_gap <= opts.limit_tol * (1.0 + d);

  std::vector<Vec> dirs;
  for (int i = 0; i < space.dim; ++i) dirs.push_back(basis_vec(space.dim, i));
  RngStream rng(seed, "analysis.raycheck.dirs");
  for (int k = 0; k < 4; ++k) dirs.push_back(rng.unit_l2(space.dim));
  GateauxProbe probe = gateaux_derivative_probe(dfield, x, dirs, opts);
  out.differentiable = probe.exists;
  out.consistent = !out.hypothesis_holds || out.differentiable;

  LimitEstimate rev = dini_lower(dfield, x, sub(xbar, x), opts);
  out.reverse_gap = std::abs(rev.value - (-d));
  return out;
}

RayGrowthBound ray_growth_bound_check(const SetSpec& set, const NormSpec& space,
                                      const Vec& x, const std::vector<double>& ts) {
  NearestPointResult near = distance(set, x, space);
  const double d = near.distance;
  if (d <= 1e-12)
    throw std::invalid_argument("ray_growth_bound_check: x must lie outside the set");
  const Vec ray = sub(x, near.minimizers[0]);
  ScalarField dfield = distance_field(set, space);
  RayGrowthBound out;
  out.max_violation = -kInf;
  for (double t : ts) {
    if (!(t > 0.0))
      throw std::invalid_argument("ray_growth_bound_check: t values must be positive");
    double v = dfield.eval(axpy(x, t, ray)) - (1.0 + t) * d;
    out.per_t.push_back(v);
    out.max_violation = std::max(out.max_violation, v);
  }
  if (ts.empty()) out.max_violation = 0.0;
  return out;
}

}  // namespace chebylab
