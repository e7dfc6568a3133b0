// Acceptance suite: one pass/fail line per criterion, exit 1 if any fails.
// Tolerances are pinned here and must not be loosened to make a run green.

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chebylab/config.hpp"
#include "chebylab/rng.hpp"

using namespace chebylab;

namespace {

#ifndef SCENARIO_DIR
#define SCENARIO_DIR ""
#endif

struct Criterion {
  bool ok = true;
  std::string detail;  // first failure, or a pass summary

  void require(bool cond, const std::string& msg) {
    if (!cond && ok) {
      ok = false;
      detail = msg;
    }
  }
  void summary(const std::string& msg) {
    if (ok) detail = msg;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::vector<std::string> golden_suite() {
  std::vector<std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(SCENARIO_DIR))
    if (e.path().extension() == ".json") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Temporarily routes stdout/stderr to /dev/null so library entry points do
// not interleave with the one-line-per-criterion output.
struct QuietGuard {
  int out_fd;
  int err_fd;
  QuietGuard() {
    std::fflush(stdout);
    std::fflush(stderr);
    out_fd = dup(1);
    err_fd = dup(2);
    const int devnull = open("/dev/null", O_WRONLY);
    dup2(devnull, 1);
    dup2(devnull, 2);
    close(devnull);
  }
  ~QuietGuard() {
    std::fflush(stdout);
    std::fflush(stderr);
    dup2(out_fd, 1);
    dup2(err_fd, 2);
    close(out_fd);
    close(err_fd);
  }
};

std::vector<Vec> compass8() {
  std::vector<Vec> dirs;
  for (int k = 0; k < 8; ++k) {
    const double a = k * 3.14159265358979323846 / 4.0;
    dirs.push_back({std::cos(a), std::sin(a)});
  }
  return dirs;
}

Scenario load_scenario(const std::string& file) {
  return build_scenario(load_config(file));
}

// --- criterion 1: convex suite consistency --------------------------------

Criterion criterion1() {
  Criterion c;
  const char* names[] = {"halfspace_l15", "halfspace_l2", "halfspace_l3",
                         "ball_l15",      "ball_l2",      "ball_l3",
                         "triangle_l15",  "triangle_l2",  "triangle_l3"};
  double worst_dev = 0.0;
  double slowest_ms = 0.0;
  for (const char* name : names) {
    const Scenario sc =
        load_scenario(std::string(SCENARIO_DIR) + "/" + name + ".json");
    c.require(sc.grid.size() == 25,
              std::string(name) + ": expected a 25-point grid, got " +
                  std::to_string(sc.grid.size()));
    const auto t0 = std::chrono::steady_clock::now();
    const ScenarioReport rep = evaluate_conditions(sc);
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    slowest_ms = std::max(slowest_ms, ms);
    c.require(ms <= 10000.0, std::string(name) + ": runtime " + fmt(ms) +
                                 " ms exceeds 10 s");
    c.require(rep.verdict.status == VerdictStatus::Consistent,
              std::string(name) + ": verdict " + to_string(rep.verdict.status));
    c.require(rep.verdict.cond_i && rep.verdict.cond_ii && rep.verdict.cond_iii &&
                  rep.verdict.cond_iv && rep.verdict.cond_v,
              std::string(name) + ": not all five conditions hold");
    for (const PointReport& p : rep.points) {
      if (p.skipped) continue;
      const double div = std::fabs(p.cond_iv.estimate.value - 1.0);
      const double dv = std::fabs(p.cond_v.estimate.value - 1.0);
      worst_dev = std::max({worst_dev, div, dv});
      c.require(div <= 1e-3, std::string(name) + " point " +
                                 std::to_string(p.index) +
                                 ": |cond_iv - 1| = " + fmt(div));
      c.require(dv <= 1e-3, std::string(name) + " point " +
                                std::to_string(p.index) +
                                ": |cond_v - 1| = " + fmt(dv));
    }
  }
  c.summary("9 scenarios CONSISTENT, max |value-1| = " + fmt(worst_dev) +
            ", slowest " + fmt(slowest_ms) + " ms");
  return c;
}

// --- criterion 2: non-convex discrimination -------------------------------

Criterion criterion2() {
  Criterion c;
  const Scenario sc = load_scenario(std::string(SCENARIO_DIR) + "/sphere_l2.json");
  std::size_t center = sc.grid.size();
  for (std::size_t i = 0; i < sc.grid.size(); ++i)
    if (std::fabs(sc.grid[i][0]) < 1e-12 && std::fabs(sc.grid[i][1]) < 1e-12)
      center = i;
  c.require(center < sc.grid.size(), "grid does not contain (0,0)");
  if (!c.ok) return c;

  const ScenarioReport rep = evaluate_conditions(sc);
  const double v = rep.points[center].cond_v.estimate.value;
  c.require(std::fabs(v + 1.0) <= 1e-3,
            "condition (v) at the center is " + fmt(v) + ", expected -1 +/- 1e-3");
  c.require(!check_condition_i(sc).holds, "check_condition_i unexpectedly holds");
  const SlopeScanReport scan = slope_criterion_scan(sc);
  c.require(scan.status == SlopeScanStatus::ConsistentNonconvex,
            "slope scan returned " + to_string(scan.status));
  c.summary("center slope " + fmt(v) + ", condition (i) false, scan " +
            to_string(scan.status));
  return c;
}

// --- criterion 3: support identity ----------------------------------------

Criterion criterion3() {
  Criterion c;
  const SetSpec half = HalfSpace{Functional{{1.0, 0.0}}, 0.0};
  const SetSpec ball = Ball{{0.0, 0.0}, 1.0};
  const std::vector<Vec> half_pts{
      {0.5, -1.0}, {1.0, 1.0}, {2.0, 0.3}, {0.7, 2.0}, {1.5, -2.0}};
  const std::vector<Vec> ball_pts{
      {2.0, 0.5}, {-2.0, 1.0}, {1.5, 1.5}, {0.5, -2.0}, {-1.2, -1.4}};
  const std::vector<Vec> dirs = compass8();
  double worst = 0.0;
  for (double p : {2.0, 3.0}) {
    const NormSpec space = NormSpec::lp(p, 2);
    struct {
      const SetSpec* set;
      const std::vector<Vec>* pts;
      const char* label;
    } cases[] = {{&half, &half_pts, "half-space"}, {&ball, &ball_pts, "ball"}};
    for (const auto& cs : cases) {
      for (const Vec& x : *cs.pts) {
        const SupportIdentityResult r =
            support_identity_check(*cs.set, space, x, dirs);
        c.require(r.preconditions_ok,
                  std::string(cs.label) + " p=" + fmt(p) +
                      ": preconditions failed (" + r.note + ")");
        worst = std::max(worst, r.discrepancy);
        c.require(r.discrepancy <= 1e-4,
                  std::string(cs.label) + " p=" + fmt(p) +
                      ": discrepancy " + fmt(r.discrepancy));
      }
    }
  }
  c.summary("max discrepancy " + fmt(worst) +
            " over 2 sets x 2 norms x 5 points x 8 directions");
  return c;
}

// --- criterion 4: ray growth inequality -----------------------------------

Criterion criterion4() {
  Criterion c;
  const SetSpec sets[] = {HalfSpace{Functional{{1.0, 0.0}}, 0.0},
                          Ball{{0.0, 0.0}, 1.0},
                          ConvexPolytope{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}}};
  const std::vector<Vec> pts{{2.0, 2.0}, {0.5, -1.5}, {3.0, 0.4}};
  const std::vector<double> ts{0.1, 0.5, 1.0};
  double worst = -1e300;
  for (double p : {1.5, 2.0, 3.0}) {
    const NormSpec space = NormSpec::lp(p, 2);
    for (const SetSpec& set : sets) {
      for (const Vec& x : pts) {
        const RayGrowthBound b = ray_growth_bound_check(set, space, x, ts);
        worst = std::max(worst, b.max_violation);
        c.require(b.max_violation <= 1e-8,
                  "violation " + fmt(b.max_violation) + " at p=" + fmt(p));
      }
    }
  }
  c.summary("max violation " + fmt(worst) + " over 27 set/norm/point cases");
  return c;
}

// --- criterion 5: l1 smoothness characterization ---------------------------

Criterion criterion5() {
  Criterion c;
  const NormSpec l1 = NormSpec::lp(1.0, 3);
  RngStream g(2024, "acceptance.smooth");
  int with_zero = 0, without_zero = 0;
  for (int i = 0; i < 100; ++i) {
    Vec x = g.box_point({-2.0, -2.0, -2.0}, {2.0, 2.0, 2.0});
    if (i % 2 == 0) x[static_cast<std::size_t>(i) % 3] = 0.0;
    if (i % 6 == 0) x[static_cast<std::size_t>(i + 1) % 3] = 0.0;
    bool all_nonzero = true;
    for (double xi : x) all_nonzero = all_nonzero && xi != 0.0;
    (all_nonzero ? without_zero : with_zero)++;
    const bool smooth = is_smooth_at(l1, x).smooth;
    c.require(smooth == all_nonzero,
              "point " + std::to_string(i) + ": is_smooth_at = " +
                  (smooth ? "true" : "false") + ", predicate = " +
                  (all_nonzero ? "true" : "false"));
  }
  c.require(with_zero >= 20 && without_zero >= 20,
            "sample is not mixed enough");
  c.summary("100/100 agree (" + std::to_string(with_zero) + " with a zero, " +
            std::to_string(without_zero) + " without)");
  return c;
}

// --- criterion 6: oscillating counterexample -------------------------------

Criterion criterion6() {
  Criterion c;
  const ScalarField phi = oscillation_field(2);
  const double two_over_pi = 2.0 / 3.14159265358979323846;
  std::vector<Vec> sample{{0.0, 0.0}, {two_over_pi, 0.0}, {0.5, 0.3},
                          {-0.2, 1.0}, {1e-3, 0.0}, {-1e-3, 2.0}};
  RngStream g(6, "acceptance.oscillation");
  for (int i = 0; i < 50; ++i)
    sample.push_back(g.box_point({-2.0, -2.0}, {2.0, 2.0}));
  const SubdifferentialCheck sub = subdifferential_check(
      phi, {0.0, 0.0}, Functional{{0.0, 0.0}}, sample);
  c.require(std::fabs(sub.max_violation) <= 1e-12,
            "zero functional violation " + fmt(sub.max_violation));

  const GateauxProbe probe = gateaux_derivative_probe(
      phi, {0.0, 0.0}, {{1.0, 0.0}, {0.0, 1.0}});
  c.require(!probe.exists, "probe reports differentiable at the origin");
  c.summary("violation " + fmt(sub.max_violation) +
            ", not differentiable at the origin");
  return c;
}

// --- criterion 7: oracle equivalence ---------------------------------------

Criterion criterion7() {
  Criterion c;
  const double res = 1e-3;
  int points = 0;
  double worst = 0.0;
  for (const std::string& file : golden_suite()) {
    const ScenarioConfig cfg = load_config(file);
    const Scenario sc = build_scenario(cfg);
    const std::optional<Box> box = sc.region;
    for (const Vec& x : sc.grid) {
      const NearestPointResult r = distance(sc.set, x, sc.norm);
      const double brute = brute_force_distance(sc.set, x, sc.norm, res, box);
      const double gap = std::fabs(r.distance - brute);
      worst = std::max(worst, gap - r.certified_error);
      ++points;
      c.require(gap <= r.certified_error + res,
                cfg.name + " at grid point: |distance - brute| = " + fmt(gap) +
                    " > certified " + fmt(r.certified_error) + " + " + fmt(res));
    }
  }
  c.summary(std::to_string(points) + " grid points across " +
            std::to_string(golden_suite().size()) +
            " scenarios, max gap-over-certificate " + fmt(worst));
  return c;
}

// --- criterion 8: Lipschitz property ---------------------------------------

Criterion criterion8() {
  Criterion c;
  long long pairs = 0;
  for (const std::string& file : golden_suite()) {
    const ScenarioConfig cfg = load_config(file);
    const Scenario sc = build_scenario(cfg);
    RngStream g(sc.seed, "acceptance.pairs");
    for (int k = 0; k < 10000; ++k) {
      const Vec x = g.box_point(sc.region.lo, sc.region.hi);
      const Vec y = g.box_point(sc.region.lo, sc.region.hi);
      const double dx = distance(sc.set, x, sc.norm).distance;
      const double dy = distance(sc.set, y, sc.norm).distance;
      ++pairs;
      if (std::fabs(dx - dy) > norm_value(sc.norm, sub(x, y)) + 1e-9) {
        c.require(false, cfg.name + ": |d(x)-d(y)| - ||x-y|| = " +
                             fmt(std::fabs(dx - dy) -
                                 norm_value(sc.norm, sub(x, y))));
        break;
      }
    }
  }
  c.summary(std::to_string(pairs) + " pairs (10000 per scenario) within slack 1e-9");
  return c;
}

// --- criterion 9: determinism ----------------------------------------------

Criterion criterion9() {
  Criterion c;
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "chebylab_acceptance";
  fs::remove_all(base);
  for (const std::string& file : golden_suite()) {
    const std::string name = fs::path(file).stem().string();
    const std::string out1 = (base / "r1" / name).string();
    const std::string out2 = (base / "r2" / name).string();
    int rc1 = 0, rc2 = 0;
    {
      QuietGuard quiet;
      rc1 = cmd_analyze(file, out1, {}, {});
      rc2 = cmd_analyze(file, out2, {}, {});
    }
    c.require(rc1 == rc2, name + ": exit codes differ (" + std::to_string(rc1) +
                              " vs " + std::to_string(rc2) + ")");
    c.require(rc1 == 0 || rc1 == 1,
              name + ": unexpected exit code " + std::to_string(rc1));
    c.require(slurp(out1 + "/report.json") == slurp(out2 + "/report.json"),
              name + ": report.json differs between runs");
    c.require(slurp(out1 + "/points.csv") == slurp(out2 + "/points.csv"),
              name + ": points.csv differs between runs");
  }
  c.summary("report.json and points.csv byte-identical across two runs of " +
            std::to_string(golden_suite().size()) + " scenarios");
  return c;
}

}  // namespace

int main() {
  struct Entry {
    const char* label;
    Criterion (*run)();
  };
  const Entry entries[] = {
      {"criterion 1: convex suite CONSISTENT with unit ray/shell slopes",
       criterion1},
      {"criterion 2: sphere center slope -1 and CONSISTENT_NONCONVEX scan",
       criterion2},
      {"criterion 3: support identity discrepancy <= 1e-4", criterion3},
      {"criterion 4: ray growth bound <= 1e-8", criterion4},
      {"criterion 5: l1 smoothness iff all coordinates nonzero", criterion5},
      {"criterion 6: oscillating counterexample (subgradient 0, no derivative)",
       criterion6},
      {"criterion 7: solver vs brute-force oracle within certificate + 1e-3",
       criterion7},
      {"criterion 8: 1-Lipschitz over 10000 seeded pairs per scenario",
       criterion8},
      {"criterion 9: byte-identical reports on the golden suite", criterion9},
  };
  int failed = 0;
  for (const Entry& e : entries) {
    Criterion c;
    try {
      c = e.run();
    } catch (const std::exception& ex) {
      c.ok = false;
      c.detail = std::string("exception: ") + ex.what();
    }
    std::printf("[%s] %s — %s\n", c.ok ? "PASS" : "FAIL", e.label,
                c.detail.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failed;
  }
  if (failed == 0) {
    std::printf("acceptance: 9/9 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", failed);
  return 1;
}
