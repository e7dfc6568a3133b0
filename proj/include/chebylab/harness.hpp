#pragma once

// Scenario-level evaluation of the convexity equivalence suite for a closed
// set K in a finite-dimensional normed space, at grid points outside K:
//   (i)   midpoint convexity of K probed through nearest points,
//   (ii)  midpoint convexity of the distance function,
//   (iii) Gateaux differentiability of the distance at each grid point,
//   (iv)  unit ray limit: lim (d(x+tz)-d(x))/t = 1 for z along x - xbar,
//   (v)   small-shell upper slope: limsup (d(x+y)-d(x))/||y|| = 1.
// Under the hypotheses (strictly convex dual, unique nearest points on the
// grid, singleton subdifferential probe) the five must agree; the verdict
// reports CONSISTENT / HYPOTHESIS_FAILED / VIOLATION accordingly.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chebylab/analysis.hpp"
#include "chebylab/norms.hpp"
#include "chebylab/sets.hpp"
#include "chebylab/vec.hpp"

namespace chebylab {

struct Tolerances {
  double limit_tol = 1e-3;      // limit agreement (1e-2 for iterative solvers)
  double sub_tol = 1e-6;        // subgradient slack (1e-4 for iterative)
  double convexity_tol = 1e-6;  // membership / midpoint violation slack
};

Tolerances default_tolerances(SolverClass cls);

struct Scenario {
  NormSpec norm;
  SetSpec set;
  std::vector<Vec> grid;
  Box region;  // sampling region for pair/probe draws
  int pair_samples = 400;
  std::uint64_t seed = 1;
  Tolerances tol;
  std::string name;
};

void validate_scenario(const Scenario& sc);

struct MidpointWitness {
  Vec u;
  Vec v;
  Vec mid;
  double violation = 0.0;
};

// (i): project sampled pairs onto K, test midpoints for membership.
struct ConditionI {
  bool holds = true;
  int pairs_checked = 0;
  std::optional<MidpointWitness> witness;
};

ConditionI check_condition_i(const Scenario& sc);

// (ii): d(mid) <= (d(u)+d(v))/2 + tol over sampled pairs.
struct ConditionII {
  bool holds = true;
  double max_violation = 0.0;
  int pairs_checked = 0;
  std::optional<MidpointWitness> witness;
};

ConditionII check_condition_ii(const Scenario& sc);

// (iv) at one grid point, along the canonical direction z = (x-xbar)/||..||.
struct ConditionIV {
  bool minimizer_unique = true;  // false is a hypothesis issue, not a failure
  Vec z;
  LimitEstimate estimate;
  bool pass = false;  // converged and |value - 1| <= limit_tol
};

ConditionIV check_condition_iv(const Scenario& sc, const Vec& x);

// (v) at one grid point: per shell radius t, the max quotient over seeded
// unit directions (plus the canonical ray when available); limsup over
// shells via the tail window.
struct ConditionV {
  LimitEstimate estimate;
  int directions_per_shell = 0;
  bool pass = false;
};

ConditionV check_condition_v(const Scenario& sc, const Vec& x,
                             std::uint64_t point_index = 0);

struct PointReport {
  std::size_t index = 0;
  Vec x;
  double distance = 0.0;
  int minimizer_clusters = 0;
  bool skipped = false;      // on or near the set; excluded from verdicts
  std::string skip_reason;
  GateauxProbe cond_iii;
  ConditionIV cond_iv;
  ConditionV cond_v;
  SubdifferentialProbe subdiff;
};

struct HypothesisReport {
  bool dual_strictly_convex = false;
  ChebyshevReport chebyshev;
  bool subdiff_all_singleton = false;
  bool subdiff_any_empty = false;  // probe exhausted: hypothesis unknown
  bool pass = false;
  std::string note;
};

enum class VerdictStatus { Consistent, HypothesisFailed, Violation };

std::string to_string(VerdictStatus v);

struct EquivalenceVerdict {
  VerdictStatus status = VerdictStatus::HypothesisFailed;
  std::string details;
  bool cond_i = false, cond_ii = false, cond_iii = false, cond_iv = false,
       cond_v = false;
  std::optional<std::size_t> witness_index;  // grid point exposing disagreement
};

struct ScenarioReport {
  HypothesisReport hypotheses;
  ConditionI cond_i;
  ConditionII cond_ii;
  std::vector<PointReport> points;
  EquivalenceVerdict verdict;
};

ScenarioReport evaluate_conditions(const Scenario& sc);

// Convexity criterion via the shell slope alone (needs only the strictly
// convex dual): slope = 1 everywhere off K implies K convex.  The scan
// cross-checks the slope against the midpoint-convexity probe.
enum class SlopeScanStatus {
  NotApplicable,       // dual not strictly convex
  ConsistentConvex,    // slope 1 everywhere and midpoint-convex
  ConsistentNonconvex, // slope fails somewhere and midpoint check fails too
  Violation,           // slope 1 everywhere yet midpoint convexity fails
  Inconclusive         // slope fails somewhere while the set looks convex
};

std::string to_string(SlopeScanStatus s);

struct SlopeScanReport {
  SlopeScanStatus status = SlopeScanStatus::NotApplicable;
  bool dual_strictly_convex = false;
  bool all_slope_one = false;
  bool midpoint_convex = false;
  std::optional<std::size_t> failing_index;
  std::string details;
};

SlopeScanReport slope_criterion_scan(const Scenario& sc);

// Precomputed scenario facts shared by the per-point implication checks.
struct ScenarioBaseline {
  bool dual_strictly_convex = false;
  bool chebyshev_on_grid = false;
  bool midpoint_convex = false;
};

ScenarioBaseline scenario_baseline(const Scenario& sc);

// Implication checks at a point x outside K:
//  - differentiability of d at x  =>  K convex   (smooth norm + smooth dual
//    + Čebyšev needed in scope),
//  - ray limit hypothesis at x    =>  K convex   (strictly convex dual).
enum class RemarkStatus { NotApplicable, Consistent, Violation, HypothesisScope };

std::string to_string(RemarkStatus s);

// Per-point record.  The remark antecedents quantify over every point off
// the set, so one point can never certify a violation by itself; the
// statuses here only say whether the check applies and ran, while the
// antecedent evidence bits feed the scenario-level aggregation (violation
// = antecedent true at every usable grid point yet midpoint convexity
// fails).
struct ImplicationChecks {
  RemarkStatus differentiability_implies_convexity = RemarkStatus::NotApplicable;
  RemarkStatus ray_limit_implies_convexity = RemarkStatus::NotApplicable;
  bool differentiable = false;   // antecedent of the first remark at x
  bool ray_hypothesis = false;   // antecedent of the second remark at x
  std::string note;
};

ImplicationChecks convexity_implication_checks(const Scenario& sc, const Vec& x,
                                               const ScenarioBaseline& base,
                                               std::uint64_t point_index = 0);

}  // namespace chebylab
