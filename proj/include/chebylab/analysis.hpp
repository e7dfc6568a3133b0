#pragma once

// Directional analysis of scalar fields (typically distance functions):
// one-sided Dini derivative estimates along a fixed geometric step
// sequence, Gateaux derivative probes, subdifferential candidate tests,
// a double-sup slope envelope, and identity checks connecting distance
// gradients with support functionals and nearest-point rays.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chebylab/norms.hpp"
#include "chebylab/sets.hpp"
#include "chebylab/vec.hpp"

namespace chebylab {

struct ScalarField {
  std::function<double(const Vec&)> eval;
  int dim = 0;
  double lipschitz_hint = 0.0;  // 0 = unknown
  std::string label;
};

ScalarField distance_field(const SetSpec& set, const NormSpec& space);
ScalarField norm_field(const NormSpec& space);
// 1 + sin(1/v_0) off the hyperplane v_0 = 0, and 0 on it: a bounded field
// whose forward quotients at the origin oscillate without a limit.
ScalarField oscillation_field(int dim);

// Geometric step sequence t_k = t0 * ratio^k, k = 0..count-1.  Estimates
// look at the last `tail` entries.
struct TSequence {
  double t0 = 0.1;
  double ratio = 0.5;
  int count = 31;
  int tail = 5;
  std::vector<double> values() const;
};

struct LimitEstimate {
  double value = 0.0;     // estimator; meaning depends on the mode
  double tail_min = 0.0;  // min over the tail window
  double tail_max = 0.0;  // max over the tail window
  std::vector<double> quotients;  // one per t_k (diagnostics)
  bool converged = false;         // tail range <= limit_tol
};

struct AnalysisOptions {
  TSequence seq;
  double limit_tol = 1e-3;  // tail-range convergence / agreement tolerance
  double sub_tol = 1e-6;    // subgradient inequality slack
};

// Lower / upper Dini derivative estimates of phi at x along y.  value is
// the tail min (resp. max); converged means the tail has settled, in which
// case liminf = limsup = limit up to limit_tol.
LimitEstimate dini_lower(const ScalarField& phi, const Vec& x, const Vec& y,
                         const AnalysisOptions& opts = {});
LimitEstimate dini_upper(const ScalarField& phi, const Vec& x, const Vec& y,
                         const AnalysisOptions& opts = {});

struct DirectionalRecord {
  Vec dir;
  LimitEstimate forward;   // right derivative estimate (tail midpoint)
  LimitEstimate backward;  // left derivative estimate
  bool exists = false;     // both converged and they agree within 3*limit_tol
  double value = 0.0;      // midpoint of forward/backward values
};

struct GateauxProbe {
  bool exists = false;
  Vec gradient;            // fitted functional (coordinates), when exists
  double linearity_error = 0.0;  // max |<A,y> - value_y| over extra dirs
  std::vector<DirectionalRecord> records;
  std::optional<Vec> witness;  // first direction where the limit fails
};

// directions must start with the standard basis (gradient fit), optionally
// followed by extra directions used as linearity checks.
GateauxProbe gateaux_derivative_probe(const ScalarField& phi, const Vec& x,
                                      const std::vector<Vec>& directions,
                                      const AnalysisOptions& opts = {});

struct SubdifferentialCheck {
  double max_violation = 0.0;  // max over sample of phi(x)+<A,y-x>-phi(y)
  Vec worst_y;
};

SubdifferentialCheck subdifferential_check(const ScalarField& phi, const Vec& x,
                                           const Functional& candidate,
                                           const std::vector<Vec>& sample);

enum class SubdiffVerdict { Empty, Singleton, Multiple };

struct SubdifferentialProbe {
  SubdiffVerdict verdict = SubdiffVerdict::Empty;
  std::vector<Functional> candidates;  // survivors of the inequality test
  std::vector<double> violations;      // max violation per survivor
  GateauxProbe probe;                  // underlying directional probe
};

// Builds candidate functionals from the directional probe (the fitted
// gradient, or one-sided combinations on kink coordinates), then tests the
// subgradient inequality on a seeded sample of 200 points in a ball of
// radius 10 plus any extra sample points supplied by the caller.
SubdifferentialProbe singleton_subdifferential_probe(
    const ScalarField& phi, const Vec& x, const NormSpec& space, int budget,
    std::uint64_t seed, const AnalysisOptions& opts = {},
    const std::vector<Vec>& extra_sample = {});

// sup over unit y and shifted base points z of the upper quotient
// (phi(x+tz+ty) - phi(x+tz)) / t.  Nested sample budgets provide a crude
// convergence signal: value/tail_max use the full budget, tail_min a
// quarter of it, converged compares full vs half.
LimitEstimate upper_slope_envelope_estimate(const ScalarField& phi, const Vec& x,
                                            const NormSpec& space, int y_samples,
                                            int z_samples, double z_radius,
                                            std::uint64_t seed,
                                            const AnalysisOptions& opts = {});

// If d_K has a Gateaux derivative A at x (outside K, unique nearest point,
// norm smooth at x - xbar), then A coincides with the support functional of
// x - xbar.  discrepancy is max |<A - f, y>| over the probe directions.
struct SupportIdentityResult {
  bool preconditions_ok = false;
  std::string note;  // which precondition failed
  double discrepancy = 0.0;
  Functional support;
  Vec gradient;
};

SupportIdentityResult support_identity_check(const SetSpec& set,
                                             const NormSpec& space, const Vec& x,
                                             const std::vector<Vec>& directions,
                                             const AnalysisOptions& opts = {});

// If the lower ray derivative of d_K at x along x - xbar equals d_K(x)
// (and the norm is smooth at x - xbar), d_K is Gateaux differentiable at x.
// The reverse ray identity D^- d(x; xbar - x) = -d(x) is recorded as an
// observation, not asserted.
struct RayLimitResult {
  bool preconditions_ok = false;
  std::string note;
  bool hypothesis_holds = false;
  bool differentiable = false;
  bool consistent = true;  // hypothesis -> differentiable
  double hypothesis_gap = 0.0;
  double reverse_gap = 0.0;
};

RayLimitResult ray_limit_differentiability_check(const SetSpec& set,
                                                 const NormSpec& space,
                                                 const Vec& x, std::uint64_t seed,
                                                 const AnalysisOptions& opts = {});

// d(x + t(x - xbar)) <= (1 + t) d(x) for every t > 0; reports the largest
// violation over the supplied t values.  Throws if x lies in the set.
struct RayGrowthBound {
  double max_violation = 0.0;
  std::vector<double> per_t;
};

RayGrowthBound ray_growth_bound_check(const SetSpec& set, const NormSpec& space,
                                      const Vec& x, const std::vector<double>& ts);

}  // namespace chebylab
