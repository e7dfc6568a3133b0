#include "chebylab/harness.hpp"

#include <algorithm>
#include <cmath>

#include "chebylab/kernels.hpp"
#include "chebylab/rng.hpp"

namespace chebylab {

namespace {

// Value tolerance used when counting minimizer clusters.
constexpr double kMultiplicityTol = 1e-6;

AnalysisOptions analysis_options(const Scenario& sc) {
  AnalysisOptions o;
  o.limit_tol = sc.tol.limit_tol;
  o.sub_tol = sc.tol.sub_tol;
  return o;
}

std::vector<Vec> probe_directions(const Scenario& sc, std::uint64_t point_index) {
  std::vector<Vec> dirs;
  for (int i = 0; i < sc.norm.dim; ++i) dirs.push_back(basis_vec(sc.norm.dim, i));
  RngStream rng(sc.seed, "harness.cond3", point_index);
  for (int k = 0; k < 4; ++k) dirs.push_back(rng.unit_l2(sc.norm.dim));
  return dirs;
}

}  // namespace

Tolerances default_tolerances(SolverClass cls) {
  Tolerances t;
  if (cls == SolverClass::Iterative) {
    t.limit_tol = 1e-2;
    t.sub_tol = 1e-4;
  }
  return t;
}

void validate_scenario(const Scenario& sc) {
  validate(sc.norm);
  const int d = validate_set(sc.set);
  if (d != sc.norm.dim)
    throw std::invalid_argument("scenario: set/space dimension mismatch");
  if (sc.grid.empty()) throw std::invalid_argument("scenario: empty grid");
  for (const Vec& g : sc.grid) {
    require_dim(g, d, "scenario grid");
    require_finite(g, "scenario grid");
  }
  require_dim(sc.region.lo, d, "scenario region");
  require_dim(sc.region.hi, d, "scenario region");
  for (int i = 0; i < d; ++i)
    if (!(sc.region.lo[static_cast<std::size_t>(i)] <
          sc.region.hi[static_cast<std::size_t>(i)]))
      throw std::invalid_argument("scenario: degenerate sampling region");
  if (sc.pair_samples < 1)
    throw std::invalid_argument("scenario: pair_samples must be positive");
}

ConditionI check_condition_i(const Scenario& sc) {
  ConditionI out;
  DistanceOptions dopts;
  dopts.value_tol = kMultiplicityTol;
  for (int j = 0; j < sc.pair_samples; ++j) {
    RngStream rng(sc.seed, "harness.cond1", static_cast<std::uint64_t>(j));
    Vec u = rng.box_point(sc.region.lo, sc.region.hi);
    Vec v = rng.box_point(sc.region.lo, sc.region.hi);
    Vec qu = distance(sc.set, u, sc.norm, dopts).minimizers[0];
    Vec qv = distance(sc.set, v, sc.norm, dopts).minimizers[0];
    Vec mid = scaled(add(qu, qv), 0.5);
    double dmid = distance(sc.set, mid, sc.norm, dopts).distance;
    ++out.pairs_checked;
    if (dmid > sc.tol.convexity_tol) {
      out.holds = false;
      out.witness = MidpointWitness{qu, qv, mid, dmid};
      break;
    }
  }
  return out;
}

ConditionII check_condition_ii(const Scenario& sc) {
  ConditionII out;
  ScalarField d = distance_field(sc.set, sc.norm);
  for (int j = 0; j < sc.pair_samples; ++j) {
    RngStream rng(sc.seed, "harness.cond2", static_cast<std::uint64_t>(j));
    Vec u = rng.box_point(sc.region.lo, sc.region.hi);
    Vec v = rng.box_point(sc.region.lo, sc.region.hi);
    Vec mid = scaled(add(u, v), 0.5);
    double viol = d.eval(mid) - 0.5 * (d.eval(u) + d.eval(v));
    ++out.pairs_checked;
    if (viol > out.max_violation) {
      out.max_violation = viol;
      out.witness = MidpointWitness{u, v, mid, viol};
    }
  }
  out.holds = out.max_violation <= sc.tol.convexity_tol;
  if (out.holds) out.witness.reset();
  return out;
}

ConditionIV check_condition_iv(const Scenario& sc, const Vec& x) {
  ConditionIV out;
  DistanceOptions dopts;
  dopts.value_tol = kMultiplicityTol;
  NearestPointResult near = distance(sc.set, x, sc.norm, dopts);
  out.minimizer_unique = near.cluster_count == 1;
  if (near.distance <= 0.0) {
    out.pass = false;
    return out;
  }
  Vec gap = sub(x, near.minimizers[0]);
  out.z = scaled(gap, 1.0 / norm_value(sc.norm, gap));
  ScalarField d = distance_field(sc.set, sc.norm);
  AnalysisOptions opts = analysis_options(sc);
  const double dx = near.distance;
  LimitEstimate est;
  est.quotients.reserve(static_cast<std::size_t>(opts.seq.count));
  // two-sided-mode tail estimate of the forward quotient
  {
    std::vector<double> ts = opts.seq.values();
    for (double t : ts)
      est.quotients.push_back((d.eval(axpy(x, t, out.z)) - dx) / t);
    est.tail_min = est.quotients[est.quotients.size() - 1];
    est.tail_max = est.tail_min;
    for (int k = opts.seq.count - opts.seq.tail; k < opts.seq.count; ++k) {
      double q = est.quotients[static_cast<std::size_t>(k)];
      est.tail_min = std::min(est.tail_min, q);
      est.tail_max = std::max(est.tail_max, q);
    }
    est.converged = std::isfinite(est.tail_min) && std::isfinite(est.tail_max) &&
                    (est.tail_max - est.tail_min) <= opts.limit_tol;
    est.value = 0.5 * (est.tail_min + est.tail_max);
  }
  out.estimate = est;
  out.pass = out.minimizer_unique && est.converged &&
             std::abs(est.value - 1.0) <= sc.tol.limit_tol;
  return out;
}

ConditionV check_condition_v(const Scenario& sc, const Vec& x,
                             std::uint64_t point_index) {
  ConditionV out;
  const int d = sc.norm.dim;
  DistanceOptions dopts;
  dopts.value_tol = kMultiplicityTol;
  NearestPointResult near = distance(sc.set, x, sc.norm, dopts);
  ScalarField dist = distance_field(sc.set, sc.norm);
  AnalysisOptions opts = analysis_options(sc);
  const double dx = near.distance;

  std::optional<Vec> canonical;
  if (near.cluster_count == 1 && dx > 0.0) {
    Vec gap = sub(x, near.minimizers[0]);
    canonical = scaled(gap, 1.0 / norm_value(sc.norm, gap));
  }
  const int random_dirs = 64;
  out.directions_per_shell = random_dirs + (canonical ? 1 : 0);

  std::vector<double> ts = opts.seq.values();
  LimitEstimate est;
  est.quotients.reserve(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double t = ts[k];
    double shell_max = -std::numeric_limits<double>::infinity();
    RngStream rng(sc.seed, "harness.cond5",
                  point_index * 1009u + static_cast<std::uint64_t>(k));
    for (int j = 0; j < random_dirs; ++j) {
      Vec u = rng.unit_l2(d);
      u = scaled(u, 1.0 / norm_value(sc.norm, u));
      shell_max = std::max(shell_max, (dist.eval(axpy(x, t, u)) - dx) / t);
    }
    if (canonical)
      shell_max = std::max(shell_max, (dist.eval(axpy(x, t, *canonical)) - dx) / t);
    est.quotients.push_back(shell_max);
  }
  est.tail_min = std::numeric_limits<double>::infinity();
  est.tail_max = -std::numeric_limits<double>::infinity();
  for (int k = opts.seq.count - opts.seq.tail; k < opts.seq.count; ++k) {
    double q = est.quotients[static_cast<std::size_t>(k)];
    est.tail_min = std::min(est.tail_min, q);
    est.tail_max = std::max(est.tail_max, q);
  }
  est.converged = std::isfinite(est.tail_min) && std::isfinite(est.tail_max) &&
                  (est.tail_max - est.tail_min) <= opts.limit_tol;
  est.value = est.tail_max;  // limsup estimator
  out.estimate = est;
  out.pass = est.converged && std::abs(est.value - 1.0) <= sc.tol.limit_tol;
  return out;
}

ScenarioReport evaluate_conditions(const Scenario& sc) {
  validate_scenario(sc);
  ScenarioReport rep;
  rep.hypotheses.dual_strictly_convex = dual_is_strictly_convex(sc.norm);
  rep.hypotheses.chebyshev =
      is_chebyshev_on_grid(sc.set, sc.norm, sc.grid, kMultiplicityTol);
  rep.cond_i = check_condition_i(sc);
  rep.cond_ii = check_condition_ii(sc);

  const std::vector<Vec> vertices = set_vertices(sc.set);
  AnalysisOptions opts = analysis_options(sc);
  ScalarField dfield = distance_field(sc.set, sc.norm);

  rep.points.resize(sc.grid.size());
  std::vector<std::string> errors(sc.grid.size());
  kernels::for_each_index(
      static_cast<std::int64_t>(sc.grid.size()), [&](std::int64_t idx) {
        PointReport& pr = rep.points[static_cast<std::size_t>(idx)];
        try {
          const Vec& x = sc.grid[static_cast<std::size_t>(idx)];
          pr.index = static_cast<std::size_t>(idx);
          pr.x = x;
          DistanceOptions dopts;
          dopts.value_tol = kMultiplicityTol;
          NearestPointResult near = distance(sc.set, x, sc.norm, dopts);
          pr.distance = near.distance;
          pr.minimizer_clusters = near.cluster_count;
          if (near.distance <= sc.tol.convexity_tol) {
            pr.skipped = true;
            pr.skip_reason = "grid point lies on or within tolerance of the set";
            return;
          }
          pr.cond_iii = gateaux_derivative_probe(
              dfield, x, probe_directions(sc, static_cast<std::uint64_t>(idx)), opts);
          pr.cond_iv = check_condition_iv(sc, x);
          pr.cond_v = check_condition_v(sc, x, static_cast<std::uint64_t>(idx));
          pr.subdiff = singleton_subdifferential_probe(
              dfield, x, sc.norm, /*budget=*/16,
              sc.seed + static_cast<std::uint64_t>(idx), opts, vertices);
        } catch (const std::exception& e) {
          errors[static_cast<std::size_t>(idx)] = e.what();
        }
      });
  for (const std::string& e : errors)
    if (!e.empty()) throw SolverError("evaluate_conditions: " + e);

  // Hypotheses: strictly convex dual, Čebyšev grid, singleton subdifferential
  // probe at every usable point.  An empty probe leaves the hypothesis
  // unknown, which downgrades any would-be violation.
  int usable = 0;
  bool all_singleton = true, any_empty = false;
  for (const PointReport& pr : rep.points) {
    if (pr.skipped) continue;
    ++usable;
    if (pr.subdiff.verdict == SubdiffVerdict::Empty) any_empty = true;
    if (pr.subdiff.verdict != SubdiffVerdict::Singleton) all_singleton = false;
  }
  rep.hypotheses.subdiff_all_singleton = all_singleton;
  rep.hypotheses.subdiff_any_empty = any_empty;
  rep.hypotheses.pass = rep.hypotheses.dual_strictly_convex &&
                        rep.hypotheses.chebyshev.chebyshev && all_singleton &&
                        usable > 0;

  // The per-condition flags are grid evidence and get filled regardless of
  // the hypotheses outcome; they are only *interpreted* as an equivalence
  // test once the hypotheses pass.
  EquivalenceVerdict& v = rep.verdict;
  v.cond_i = rep.cond_i.holds;
  v.cond_ii = rep.cond_ii.holds;
  v.cond_iii = usable > 0;
  v.cond_iv = usable > 0;
  v.cond_v = usable > 0;
  std::optional<std::size_t> first_mismatch;
  for (const PointReport& pr : rep.points) {
    if (pr.skipped) continue;
    if (!pr.cond_iii.exists) {
      v.cond_iii = false;
      if (!first_mismatch) first_mismatch = pr.index;
    }
    if (!pr.cond_iv.pass) {
      v.cond_iv = false;
      if (!first_mismatch) first_mismatch = pr.index;
    }
    if (!pr.cond_v.pass) {
      v.cond_v = false;
      if (!first_mismatch) first_mismatch = pr.index;
    }
  }

  if (!rep.hypotheses.pass) {
    v.status = VerdictStatus::HypothesisFailed;
    std::string& n = rep.hypotheses.note;
    if (!rep.hypotheses.dual_strictly_convex) n += "dual space not strictly convex; ";
    if (!rep.hypotheses.chebyshev.chebyshev)
      n += "non-unique nearest point on the grid (" +
           std::to_string(rep.hypotheses.chebyshev.witnesses.size()) + " witnesses); ";
    if (any_empty) n += "subdifferential probe found no candidate (hypothesis unknown); ";
    if (!all_singleton && !any_empty) n += "subdifferential probe not singleton; ";
    if (usable == 0) n += "no grid points off the set; ";
    v.details = n;
    return rep;
  }

  const bool all_true =
      v.cond_i && v.cond_ii && v.cond_iii && v.cond_iv && v.cond_v;
  const bool all_false =
      !v.cond_i && !v.cond_ii && !v.cond_iii && !v.cond_iv && !v.cond_v;
  if (all_true || all_false) {
    v.status = VerdictStatus::Consistent;
    v.details = all_true ? "all five conditions hold"
                         : "all five conditions fail together";
  } else {
    v.status = VerdictStatus::Violation;
    v.witness_index = first_mismatch;
    v.details = "conditions disagree: i=" + std::to_string(v.cond_i) +
                " ii=" + std::to_string(v.cond_ii) +
                " iii=" + std::to_string(v.cond_iii) +
                " iv=" + std::to_string(v.cond_iv) +
                " v=" + std::to_string(v.cond_v);
  }
  return rep;
}

SlopeScanReport slope_criterion_scan(const Scenario& sc) {
  validate_scenario(sc);
  SlopeScanReport rep;
  rep.dual_strictly_convex = dual_is_strictly_convex(sc.norm);
  if (!rep.dual_strictly_convex) {
    rep.status = SlopeScanStatus::NotApplicable;
    rep.details = "dual space not strictly convex";
    return rep;
  }
  rep.all_slope_one = true;
  std::vector<char> slope_ok(sc.grid.size(), 1);
  std::vector<char> skipped(sc.grid.size(), 0);
  std::vector<std::string> errors(sc.grid.size());
  kernels::for_each_index(
      static_cast<std::int64_t>(sc.grid.size()), [&](std::int64_t idx) {
        try {
          const Vec& x = sc.grid[static_cast<std::size_t>(idx)];
          if (distance(sc.set, x, sc.norm).distance <= sc.tol.convexity_tol) {
            skipped[static_cast<std::size_t>(idx)] = 1;
            return;
          }
          ConditionV cv = check_condition_v(sc, x, static_cast<std::uint64_t>(idx));
          slope_ok[static_cast<std::size_t>(idx)] = cv.pass ? 1 : 0;
        } catch (const std::exception& e) {
          errors[static_cast<std::size_t>(idx)] = e.what();
        }
      });
  for (const std::string& e : errors)
    if (!e.empty()) throw SolverError("slope_criterion_scan: " + e);
  for (std::size_t i = 0; i < sc.grid.size(); ++i) {
    if (skipped[i]) continue;
    if (!slope_ok[i]) {
      rep.all_slope_one = false;
      if (!rep.failing_index) rep.failing_index = i;
    }
  }
  rep.midpoint_convex = check_condition_i(sc).holds;
  if (rep.all_slope_one && rep.midpoint_convex) {
    rep.status = SlopeScanStatus::ConsistentConvex;
    rep.details = "slope 1 everywhere off the set; midpoint-convexity holds";
  } else if (!rep.all_slope_one && !rep.midpoint_convex) {
    rep.status = SlopeScanStatus::ConsistentNonconvex;
    rep.details = "slope criterion fails and the set is not midpoint-convex";
  } else if (rep.all_slope_one && !rep.midpoint_convex) {
    rep.status = SlopeScanStatus::Violation;
    rep.details = "slope 1 everywhere yet midpoint convexity fails";
  } else {
    rep.status = SlopeScanStatus::Inconclusive;
    rep.details = "set looks midpoint-convex but the slope criterion fails "
                  "somewhere (criterion gives no converse)";
  }
  return rep;
}

ScenarioBaseline scenario_baseline(const Scenario& sc) {
  validate_scenario(sc);
  ScenarioBaseline b;
  b.dual_strictly_convex = dual_is_strictly_convex(sc.norm);
  b.chebyshev_on_grid =
      is_chebyshev_on_grid(sc.set, sc.norm, sc.grid, kMultiplicityTol).chebyshev;
  b.midpoint_convex = check_condition_i(sc).holds;
  return b;
}

ImplicationChecks convexity_implication_checks(const Scenario& sc, const Vec& x,
                                               const ScenarioBaseline& base,
                                               std::uint64_t point_index) {
  ImplicationChecks out;
  AnalysisOptions opts = analysis_options(sc);
  const double dx = distance(sc.set, x, sc.norm).distance;
  if (dx <= sc.tol.convexity_tol) {
    out.note = "x lies on the set; implications are vacuous here";
    return out;
  }

  // Differentiability => convexity needs a smooth norm with smooth dual
  // (finite p > 1 in this family) plus the Čebyšev property in scope.
  const bool smooth_family = !sc.norm.is_inf() && sc.norm.p > 1.0;
  if (!smooth_family || !base.dual_strictly_convex) {
    out.differentiability_implies_convexity = RemarkStatus::NotApplicable;
  } else if (!base.chebyshev_on_grid) {
    out.differentiability_implies_convexity = RemarkStatus::HypothesisScope;
    out.note = "grid evidence shows non-unique nearest points; the "
               "implication needs the property globally";
  } else {
    ScalarField dfield = distance_field(sc.set, sc.norm);
    GateauxProbe probe =
        gateaux_derivative_probe(dfield, x, probe_directions(sc, point_index), opts);
    out.differentiable = probe.exists;
    out.differentiability_implies_convexity = RemarkStatus::Consistent;
  }

  // Ray limit => convexity needs only the strictly convex dual.
  if (!base.dual_strictly_convex) {
    out.ray_limit_implies_convexity = RemarkStatus::NotApplicable;
  } else if (!base.chebyshev_on_grid) {
    out.ray_limit_implies_convexity = RemarkStatus::HypothesisScope;
  } else {
    RayLimitResult ray = ray_limit_differentiability_check(
        sc.set, sc.norm, x, sc.seed + point_index, opts);
    out.ray_hypothesis = ray.preconditions_ok && ray.hypothesis_holds;
    out.ray_limit_implies_convexity = RemarkStatus::Consistent;
  }
  return out;
}

std::string to_string(VerdictStatus v) {
  switch (v) {
    case VerdictStatus::Consistent: return "CONSISTENT";
    case VerdictStatus::HypothesisFailed: return "HYPOTHESIS_FAILED";
    case VerdictStatus::Violation: return "VIOLATION";
  }
  return "?";
}

std::string to_string(SlopeScanStatus s) {
  switch (s) {
    case SlopeScanStatus::NotApplicable: return "NOT_APPLICABLE";
    case SlopeScanStatus::ConsistentConvex: return "CONSISTENT_CONVEX";
    case SlopeScanStatus::ConsistentNonconvex: return "CONSISTENT_NONCONVEX";
    case SlopeScanStatus::Violation: return "VIOLATION";
    case SlopeScanStatus::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::string to_string(RemarkStatus s) {
  switch (s) {
    case RemarkStatus::NotApplicable: return "NOT_APPLICABLE";
    case RemarkStatus::Consistent: return "CONSISTENT";
    case RemarkStatus::Violation: return "VIOLATION";
    case RemarkStatus::HypothesisScope: return "HYPOTHESIS_SCOPE";
  }
  return "?";
}

}  // namespace chebylab
