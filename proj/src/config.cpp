#include "chebylab/config.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "chebylab/kernels.hpp"
#include "chebylab/rng.hpp"
#include "chebylab/strfmt.hpp"

namespace chebylab {
namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path, what);
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail(path + "." + item.key(), "unknown field");
  }
}

const json& require_key(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double parse_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int parse_count(const json& j, const std::string& path, int min_value) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  const long long v = j.get<long long>();
  if (v < min_value || v > std::numeric_limits<int>::max())
    fail(path, "expected an integer >= " + std::to_string(min_value));
  return static_cast<int>(v);
}

std::uint64_t parse_seed(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0)
    return static_cast<std::uint64_t>(j.get<long long>());
  fail(path, "expected a non-negative integer");
}

std::string parse_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Vec parse_vec(const json& j, const std::string& path, int want_dim = 0) {
  if (!j.is_array() || j.empty())
    fail(path, "expected a non-empty array of numbers");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v[i] = parse_double(j[i], path + "[" + std::to_string(i) + "]");
  if (want_dim > 0 && static_cast<int>(v.size()) != want_dim)
    fail(path, "expected " + std::to_string(want_dim) + " entries, got " +
                   std::to_string(v.size()));
  return v;
}

std::vector<Vec> parse_vec_list(const json& j, const std::string& path,
                                int want_dim = 0) {
  if (!j.is_array()) fail(path, "expected an array of points");
  std::vector<Vec> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_vec(j[i], path + "[" + std::to_string(i) + "]", want_dim));
  return out;
}

std::vector<int> parse_counts(const json& j, const std::string& path,
                              std::size_t want_size) {
  if (!j.is_array() || j.size() != want_size)
    fail(path, "expected an array of " + std::to_string(want_size) + " integers");
  std::vector<int> out(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out[i] = parse_count(j[i], path + "[" + std::to_string(i) + "]", 1);
  return out;
}

// p is a number >= 1 or the string "inf".
double parse_p(const json& j, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf")
      return std::numeric_limits<double>::infinity();
    fail(path, "expected a number or \"inf\"");
  }
  return parse_double(j, path);
}

NormSpec parse_norm(const json& j, const std::string& path) {
  expect_object(j, path);
  const std::string kind = parse_string(require_key(j, path, "kind"), path + ".kind");
  try {
    if (kind == "lp") {
      reject_unknown(j, path, {"kind", "p", "dim"});
      return NormSpec::lp(parse_p(require_key(j, path, "p"), path + ".p"),
                          parse_count(require_key(j, path, "dim"), path + ".dim", 1));
    }
    if (kind == "weighted_lp") {
      reject_unknown(j, path, {"kind", "p", "weights"});
      return NormSpec::weighted_lp(
          parse_p(require_key(j, path, "p"), path + ".p"),
          parse_vec(require_key(j, path, "weights"), path + ".weights"));
    }
    if (kind == "max") {
      reject_unknown(j, path, {"kind", "dim"});
      return NormSpec::max_norm(
          parse_count(require_key(j, path, "dim"), path + ".dim", 1));
    }
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  fail(path + ".kind", "expected \"lp\", \"weighted_lp\" or \"max\"");
}

SetSpec parse_set(const json& j, const std::string& path) {
  expect_object(j, path);
  const std::string type = parse_string(require_key(j, path, "type"), path + ".type");
  if (type == "point_cloud") {
    reject_unknown(j, path, {"type", "points"});
    return PointCloud{parse_vec_list(require_key(j, path, "points"), path + ".points")};
  }
  if (type == "polytope") {
    reject_unknown(j, path, {"type", "vertices"});
    return ConvexPolytope{
        parse_vec_list(require_key(j, path, "vertices"), path + ".vertices")};
  }
  if (type == "half_space") {
    reject_unknown(j, path, {"type", "a", "b"});
    return HalfSpace{Functional{parse_vec(require_key(j, path, "a"), path + ".a")},
                     parse_double(require_key(j, path, "b"), path + ".b")};
  }
  if (type == "ball" || type == "sphere") {
    reject_unknown(j, path, {"type", "center", "radius"});
    Vec center = parse_vec(require_key(j, path, "center"), path + ".center");
    const double radius =
        parse_double(require_key(j, path, "radius"), path + ".radius");
    if (type == "ball") return Ball{std::move(center), radius};
    return Sphere{std::move(center), radius};
  }
  if (type == "function_graph") {
    reject_unknown(j, path, {"type", "lo", "hi", "values"});
    FunctionGraph g;
    g.lo = parse_double(require_key(j, path, "lo"), path + ".lo");
    g.hi = parse_double(require_key(j, path, "hi"), path + ".hi");
    g.values = parse_vec(require_key(j, path, "values"), path + ".values");
    return g;
  }
  if (type == "union") {
    reject_unknown(j, path, {"type", "parts"});
    const json& parts = require_key(j, path, "parts");
    if (!parts.is_array() || parts.size() < 2)
      fail(path + ".parts", "expected an array of at least two sets");
    UnionSet u;
    for (std::size_t i = 0; i < parts.size(); ++i)
      u.parts.push_back(parse_set(parts[i], path + ".parts[" + std::to_string(i) + "]"));
    return u;
  }
  fail(path + ".type",
       "expected one of \"point_cloud\", \"polytope\", \"half_space\", \"ball\", "
       "\"sphere\", \"function_graph\", \"union\"");
}

GridSpec parse_grid(const json& j, const std::string& path, int dim) {
  expect_object(j, path);
  reject_unknown(j, path, {"lattice", "points", "extra_points"});
  GridSpec g;
  const bool has_lattice = j.contains("lattice");
  const bool has_points = j.contains("points");
  if (has_lattice == has_points)
    fail(path, "provide exactly one of \"lattice\" or \"points\"");
  if (has_lattice) {
    const json& l = j["lattice"];
    const std::string lp = path + ".lattice";
    expect_object(l, lp);
    reject_unknown(l, lp, {"lo", "hi", "counts", "jitter", "target_count"});
    LatticeSpec lat;
    lat.lo = parse_vec(require_key(l, lp, "lo"), lp + ".lo", dim);
    lat.hi = parse_vec(require_key(l, lp, "hi"), lp + ".hi", dim);
    for (int d = 0; d < dim; ++d)
      if (!(lat.lo[d] <= lat.hi[d]))
        fail(lp, "lo must not exceed hi in any coordinate");
    lat.counts = parse_counts(require_key(l, lp, "counts"), lp + ".counts",
                              static_cast<std::size_t>(dim));
    if (l.contains("jitter")) {
      lat.jitter = parse_double(l["jitter"], lp + ".jitter");
      if (lat.jitter < 0.0) fail(lp + ".jitter", "expected a non-negative number");
    }
    if (l.contains("target_count"))
      lat.target_count = parse_count(l["target_count"], lp + ".target_count", 0);
    g.lattice = lat;
  } else {
    g.points = parse_vec_list(j["points"], path + ".points", dim);
    if (g.points.empty()) fail(path + ".points", "expected at least one point");
  }
  if (j.contains("extra_points"))
    g.extra_points = parse_vec_list(j["extra_points"], path + ".extra_points", dim);
  return g;
}

Box parse_box(const json& j, const std::string& path, int dim) {
  expect_object(j, path);
  reject_unknown(j, path, {"lo", "hi"});
  Box b;
  b.lo = parse_vec(require_key(j, path, "lo"), path + ".lo", dim);
  b.hi = parse_vec(require_key(j, path, "hi"), path + ".hi", dim);
  for (int d = 0; d < dim; ++d)
    if (!(b.lo[d] < b.hi[d]))
      fail(path, "lo must be strictly below hi in every coordinate");
  return b;
}

ToleranceOverrides parse_tolerances(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path, {"limit_tol", "sub_tol", "convexity_tol"});
  ToleranceOverrides t;
  const auto read = [&](const char* key, std::optional<double>& slot) {
    if (!j.contains(key)) return;
    const double v = parse_double(j[key], path + "." + key);
    if (!(v > 0.0)) fail(path + "." + key, "expected a positive number");
    slot = v;
  };
  read("limit_tol", t.limit_tol);
  read("sub_tol", t.sub_tol);
  read("convexity_tol", t.convexity_tol);
  return t;
}

PlotSpec parse_plot(const json& j, const std::string& path, int dim) {
  expect_object(j, path);
  reject_unknown(j, path, {"lo", "hi", "counts"});
  PlotSpec p;
  p.lo = parse_vec(require_key(j, path, "lo"), path + ".lo", dim);
  p.hi = parse_vec(require_key(j, path, "hi"), path + ".hi", dim);
  for (int d = 0; d < dim; ++d)
    if (!(p.lo[d] < p.hi[d]))
      fail(path, "lo must be strictly below hi in every coordinate");
  p.counts = parse_counts(require_key(j, path, "counts"), path + ".counts",
                          static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < p.counts.size(); ++i)
    if (p.counts[i] < 2)
      fail(path + ".counts[" + std::to_string(i) + "]", "expected an integer >= 2");
  return p;
}

json p_to_json(double p) {
  if (std::isinf(p)) return json("inf");
  return json(p);
}

json norm_to_json(const NormSpec& s) {
  switch (s.kind) {
    case NormKind::Lp:
      return json{{"kind", "lp"}, {"p", p_to_json(s.p)}, {"dim", s.dim}};
    case NormKind::WeightedLp:
      return json{{"kind", "weighted_lp"}, {"p", p_to_json(s.p)}, {"weights", s.weights}};
    case NormKind::MaxNorm:
      return json{{"kind", "max"}, {"dim", s.dim}};
  }
  return json();
}

json set_to_json(const SetSpec& s);

json set_to_json_impl(const UnionSet& u) {
  json parts = json::array();
  for (const auto& part : u.parts) parts.push_back(set_to_json(part));
  return json{{"type", "union"}, {"parts", std::move(parts)}};
}

json set_to_json(const SetSpec& s) {
  return std::visit(
      overloaded{
          [](const PointCloud& c) {
            return json{{"type", "point_cloud"}, {"points", c.points}};
          },
          [](const ConvexPolytope& p) {
            return json{{"type", "polytope"}, {"vertices", p.vertices}};
          },
          [](const HalfSpace& h) {
            return json{{"type", "half_space"}, {"a", h.a.coords}, {"b", h.b}};
          },
          [](const Ball& b) {
            return json{{"type", "ball"}, {"center", b.center}, {"radius", b.radius}};
          },
          [](const Sphere& sp) {
            return json{
                {"type", "sphere"}, {"center", sp.center}, {"radius", sp.radius}};
          },
          [](const FunctionGraph& g) {
            return json{{"type", "function_graph"},
                        {"lo", g.lo},
                        {"hi", g.hi},
                        {"values", g.values}};
          },
          [](const UnionSet& u) { return set_to_json_impl(u); }},
      s);
}

json grid_to_json(const GridSpec& g) {
  json j = json::object();
  if (g.lattice) {
    const LatticeSpec& l = *g.lattice;
    j["lattice"] = json{{"lo", l.lo},
                        {"hi", l.hi},
                        {"counts", l.counts},
                        {"jitter", l.jitter},
                        {"target_count", l.target_count}};
  } else {
    j["points"] = g.points;
  }
  if (!g.extra_points.empty()) j["extra_points"] = g.extra_points;
  return j;
}

// Row-major lattice over [lo, hi] with inclusive endpoints; singleton axes
// collapse to the midpoint.  Jitter draws come from a per-node stream so the
// result does not depend on evaluation order.
std::vector<Vec> lattice_points(const LatticeSpec& lat, std::uint64_t seed) {
  const int dim = dim_of(lat.lo);
  long long total = 1;
  for (int c : lat.counts) {
    total *= c;
    if (total > 1000000) fail("config.grid.lattice.counts", "lattice larger than 1e6 nodes");
  }
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(total));
  for (long long flat = 0; flat < total; ++flat) {
    Vec x(dim);
    long long rem = flat;
    for (int d = dim - 1; d >= 0; --d) {
      const int n = lat.counts[d];
      const int i = static_cast<int>(rem % n);
      rem /= n;
      x[d] = n == 1 ? 0.5 * (lat.lo[d] + lat.hi[d])
                    : lat.lo[d] + (lat.hi[d] - lat.lo[d]) *
                                      (static_cast<double>(i) / (n - 1));
    }
    if (lat.jitter > 0.0) {
      RngStream g(seed, "grid.jitter", static_cast<std::uint64_t>(flat));
      for (int d = 0; d < dim; ++d) x[d] += lat.jitter * g.uniform(-1.0, 1.0);
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

Box derived_region(const Scenario& sc) {
  Box b{sc.grid.front(), sc.grid.front()};
  for (const Vec& pt : sc.grid) {
    for (int d = 0; d < sc.norm.dim; ++d) {
      b.lo[d] = std::min(b.lo[d], pt[d]);
      b.hi[d] = std::max(b.hi[d], pt[d]);
    }
  }
  if (auto sb = set_bounds(sc.set, sc.norm)) {
    for (int d = 0; d < sc.norm.dim; ++d) {
      b.lo[d] = std::min(b.lo[d], sb->lo[d]);
      b.hi[d] = std::max(b.hi[d], sb->hi[d]);
    }
  }
  for (int d = 0; d < sc.norm.dim; ++d) {
    b.lo[d] -= 1.0;
    b.hi[d] += 1.0;
  }
  return b;
}

std::string subdiff_str(SubdiffVerdict v) {
  switch (v) {
    case SubdiffVerdict::Empty: return "EMPTY";
    case SubdiffVerdict::Singleton: return "SINGLETON";
    case SubdiffVerdict::Multiple: return "MULTIPLE";
  }
  return "?";
}

json limit_json(const LimitEstimate& e) {
  return json{{"value", e.value},
              {"tail_min", e.tail_min},
              {"tail_max", e.tail_max},
              {"converged", e.converged}};
}

json midpoint_witness_json(const MidpointWitness& w) {
  return json{{"u", w.u}, {"v", w.v}, {"mid", w.mid}, {"violation", w.violation}};
}

json point_json(const PointReport& p, const ImplicationChecks& imp) {
  json j;
  j["index"] = p.index;
  j["x"] = p.x;
  j["distance"] = p.distance;
  j["minimizer_clusters"] = p.minimizer_clusters;
  j["skipped"] = p.skipped;
  j["implications"] =
      json{{"differentiability_implies_convexity",
            to_string(imp.differentiability_implies_convexity)},
           {"ray_limit_implies_convexity", to_string(imp.ray_limit_implies_convexity)}};
  if (imp.differentiability_implies_convexity == RemarkStatus::Consistent)
    j["implications"]["differentiable"] = imp.differentiable;
  if (imp.ray_limit_implies_convexity == RemarkStatus::Consistent)
    j["implications"]["ray_hypothesis"] = imp.ray_hypothesis;
  if (!imp.note.empty()) j["implications"]["note"] = imp.note;
  if (p.skipped) {
    j["skip_reason"] = p.skip_reason;
    return j;
  }
  j["gateaux"] = json{{"exists", p.cond_iii.exists},
                      {"linearity_error", p.cond_iii.linearity_error}};
  if (p.cond_iii.exists) j["gateaux"]["gradient"] = p.cond_iii.gradient;
  j["ray_limit"] = json{{"unique_minimizer", p.cond_iv.minimizer_unique},
                        {"estimate", limit_json(p.cond_iv.estimate)},
                        {"pass", p.cond_iv.pass}};
  j["shell_slope"] = json{{"estimate", limit_json(p.cond_v.estimate)},
                          {"directions_per_shell", p.cond_v.directions_per_shell},
                          {"pass", p.cond_v.pass}};
  j["subdifferential"] = json{{"verdict", subdiff_str(p.subdiff.verdict)},
                              {"candidates", p.subdiff.candidates.size()}};
  return j;
}

// Scenario-level remark verdict.  The antecedents quantify over every point
// off the set, so a violation needs the antecedent to hold at all usable
// grid points while the midpoint-convexity probe fails; any point where the
// scope hypotheses could not be established caps the verdict at
// HYPOTHESIS_SCOPE.
RemarkStatus aggregate_remark(const std::vector<ImplicationChecks>& imps,
                              bool midpoint_convex, bool use_ray) {
  bool any_scope = false;
  bool any_applicable = false;
  bool all_antecedent = true;
  for (const ImplicationChecks& imp : imps) {
    const RemarkStatus s = use_ray ? imp.ray_limit_implies_convexity
                                   : imp.differentiability_implies_convexity;
    if (s == RemarkStatus::HypothesisScope) any_scope = true;
    if (s == RemarkStatus::Consistent) {
      any_applicable = true;
      all_antecedent =
          all_antecedent && (use_ray ? imp.ray_hypothesis : imp.differentiable);
    }
  }
  if (any_scope) return RemarkStatus::HypothesisScope;
  if (!any_applicable) return RemarkStatus::NotApplicable;
  if (all_antecedent && !midpoint_convex) return RemarkStatus::Violation;
  return RemarkStatus::Consistent;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("output", "cannot open " + path + " for writing");
  out << content;
  if (!out) fail("output", "write to " + path + " failed");
}

std::string join_coords(const Vec& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_double(v[i]);
  }
  return s + "]";
}

}  // namespace

ScenarioConfig parse_config(const json& j) {
  expect_object(j, "config");
  reject_unknown(j, "config",
                 {"schema_version", "name", "seed", "norm", "set", "grid", "region",
                  "pair_samples", "tolerances", "plot"});
  ScenarioConfig cfg;
  cfg.schema_version =
      parse_count(require_key(j, "config", "schema_version"), "config.schema_version", 1);
  if (cfg.schema_version != kSchemaVersion)
    fail("config.schema_version",
         "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
  cfg.name = parse_string(require_key(j, "config", "name"), "config.name");
  if (cfg.name.empty()) fail("config.name", "expected a non-empty string");
  if (j.contains("seed")) cfg.seed = parse_seed(j["seed"], "config.seed");
  cfg.norm = parse_norm(require_key(j, "config", "norm"), "config.norm");
  cfg.set = parse_set(require_key(j, "config", "set"), "config.set");
  int sdim = 0;
  try {
    sdim = validate_set(cfg.set);
  } catch (const std::invalid_argument& e) {
    fail("config.set", e.what());
  }
  if (sdim != cfg.norm.dim)
    fail("config.set", "set dimension " + std::to_string(sdim) +
                           " does not match norm dimension " +
                           std::to_string(cfg.norm.dim));
  cfg.grid = parse_grid(require_key(j, "config", "grid"), "config.grid", sdim);
  if (j.contains("region")) cfg.region = parse_box(j["region"], "config.region", sdim);
  if (j.contains("pair_samples"))
    cfg.pair_samples = parse_count(j["pair_samples"], "config.pair_samples", 1);
  if (j.contains("tolerances"))
    cfg.tolerances = parse_tolerances(j["tolerances"], "config.tolerances");
  if (j.contains("plot")) cfg.plot = parse_plot(j["plot"], "config.plot", sdim);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("config", "cannot open file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail("config", std::string("JSON parse failure: ") + e.what());
  }
  return parse_config(j);
}

json config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["name"] = cfg.name;
  j["seed"] = cfg.seed;
  j["norm"] = norm_to_json(cfg.norm);
  j["set"] = set_to_json(cfg.set);
  j["grid"] = grid_to_json(cfg.grid);
  if (cfg.region)
    j["region"] = json{{"lo", cfg.region->lo}, {"hi", cfg.region->hi}};
  j["pair_samples"] = cfg.pair_samples;
  json tols = json::object();
  if (cfg.tolerances.limit_tol) tols["limit_tol"] = *cfg.tolerances.limit_tol;
  if (cfg.tolerances.sub_tol) tols["sub_tol"] = *cfg.tolerances.sub_tol;
  if (cfg.tolerances.convexity_tol)
    tols["convexity_tol"] = *cfg.tolerances.convexity_tol;
  if (!tols.empty()) j["tolerances"] = tols;
  if (cfg.plot)
    j["plot"] = json{{"lo", cfg.plot->lo}, {"hi", cfg.plot->hi}, {"counts", cfg.plot->counts}};
  return j;
}

Scenario build_scenario(const ScenarioConfig& cfg,
                        std::optional<std::uint64_t> seed_override,
                        std::optional<double> tol_override) {
  Scenario sc;
  sc.norm = cfg.norm;
  sc.set = cfg.set;
  sc.name = cfg.name;
  sc.seed = seed_override.value_or(cfg.seed);
  sc.pair_samples = cfg.pair_samples;
  sc.tol = default_tolerances(solver_class(cfg.set, cfg.norm));
  if (cfg.tolerances.limit_tol) sc.tol.limit_tol = *cfg.tolerances.limit_tol;
  if (cfg.tolerances.sub_tol) sc.tol.sub_tol = *cfg.tolerances.sub_tol;
  if (cfg.tolerances.convexity_tol)
    sc.tol.convexity_tol = *cfg.tolerances.convexity_tol;
  if (tol_override) sc.tol.limit_tol = *tol_override;

  if (cfg.grid.lattice) {
    const LatticeSpec& lat = *cfg.grid.lattice;
    for (Vec& pt : lattice_points(lat, sc.seed)) {
      if (lat.target_count > 0 &&
          static_cast<int>(sc.grid.size()) >= lat.target_count)
        break;
      // Lattice nodes on (or within tolerance of) the set contribute nothing
      // to the off-set conditions; keep only genuine exterior points.
      if (distance(cfg.set, pt, cfg.norm).distance > sc.tol.convexity_tol)
        sc.grid.push_back(std::move(pt));
    }
    if (lat.target_count > 0 &&
        static_cast<int>(sc.grid.size()) < lat.target_count)
      fail("config.grid.lattice.target_count",
           "only " + std::to_string(sc.grid.size()) +
               " off-set lattice points available");
  } else {
    sc.grid = cfg.grid.points;
  }
  for (const Vec& pt : cfg.grid.extra_points) sc.grid.push_back(pt);

  sc.region = cfg.region ? *cfg.region : derived_region(sc);
  validate_scenario(sc);
  return sc;
}

AnalysisArtifacts run_analysis(const Scenario& sc) {
  AnalysisArtifacts art;
  art.report = evaluate_conditions(sc);
  art.slope_scan = slope_criterion_scan(sc);

  ScenarioBaseline base;
  base.dual_strictly_convex = art.report.hypotheses.dual_strictly_convex;
  base.chebyshev_on_grid = art.report.hypotheses.chebyshev.chebyshev;
  base.midpoint_convex = art.report.cond_i.holds;

  const std::size_t n = sc.grid.size();
  art.implications.resize(n);
  std::vector<std::string> errors(n);
  kernels::for_each_index(static_cast<std::int64_t>(n), [&](std::int64_t i) {
    try {
      art.implications[static_cast<std::size_t>(i)] = convexity_implication_checks(
          sc, sc.grid[static_cast<std::size_t>(i)], base,
          static_cast<std::uint64_t>(i));
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  });
  for (const std::string& msg : errors)
    if (!msg.empty()) throw SolverError("implication checks: " + msg);
  return art;
}

json build_report_json(const ScenarioConfig& cfg, const Scenario& sc,
                       const AnalysisArtifacts& art) {
  const ScenarioReport& rep = art.report;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = json{{"name", kToolName}, {"version", kToolVersion}};
  j["scenario"] = config_to_json(cfg);
  j["effective"] =
      json{{"seed", sc.seed},
           {"grid_points", sc.grid.size()},
           {"solver_class", solver_class(sc.set, sc.norm) == SolverClass::Analytic
                                ? "analytic"
                                : "iterative"},
           {"norm", norm_label(sc.norm)},
           {"set", set_label(sc.set)},
           {"tolerances", json{{"limit_tol", sc.tol.limit_tol},
                               {"sub_tol", sc.tol.sub_tol},
                               {"convexity_tol", sc.tol.convexity_tol}}}};

  json hyp;
  hyp["dual_strictly_convex"] = rep.hypotheses.dual_strictly_convex;
  hyp["chebyshev_on_grid"] = rep.hypotheses.chebyshev.chebyshev;
  json wits = json::array();
  for (const ChebyshevWitness& w : rep.hypotheses.chebyshev.witnesses)
    wits.push_back(json{{"grid_index", w.grid_index},
                        {"point", w.point},
                        {"minimizers", w.minimizers}});
  hyp["chebyshev_witnesses"] = std::move(wits);
  hyp["subdiff_all_singleton"] = rep.hypotheses.subdiff_all_singleton;
  hyp["subdiff_any_empty"] = rep.hypotheses.subdiff_any_empty;
  hyp["pass"] = rep.hypotheses.pass;
  hyp["note"] = rep.hypotheses.note;
  j["hypotheses"] = std::move(hyp);

  json conds;
  conds["i"] = json{{"holds", rep.cond_i.holds},
                    {"pairs_checked", rep.cond_i.pairs_checked}};
  if (rep.cond_i.witness)
    conds["i"]["witness"] = midpoint_witness_json(*rep.cond_i.witness);
  conds["ii"] = json{{"holds", rep.cond_ii.holds},
                     {"max_violation", rep.cond_ii.max_violation},
                     {"pairs_checked", rep.cond_ii.pairs_checked}};
  if (rep.cond_ii.witness)
    conds["ii"]["witness"] = midpoint_witness_json(*rep.cond_ii.witness);
  conds["iii"] = json{{"holds", rep.verdict.cond_iii}};
  conds["iv"] = json{{"holds", rep.verdict.cond_iv}};
  conds["v"] = json{{"holds", rep.verdict.cond_v}};
  j["conditions"] = std::move(conds);

  json pts = json::array();
  for (std::size_t i = 0; i < rep.points.size(); ++i)
    pts.push_back(point_json(rep.points[i], art.implications[i]));
  j["points"] = std::move(pts);

  j["verdict"] = json{{"status", to_string(rep.verdict.status)},
                      {"details", rep.verdict.details}};
  if (rep.verdict.witness_index)
    j["verdict"]["witness_index"] = *rep.verdict.witness_index;

  const SlopeScanReport& ss = art.slope_scan;
  j["slope_scan"] = json{{"status", to_string(ss.status)},
                         {"dual_strictly_convex", ss.dual_strictly_convex},
                         {"all_slope_one", ss.all_slope_one},
                         {"midpoint_convex", ss.midpoint_convex},
                         {"details", ss.details}};
  if (ss.failing_index) j["slope_scan"]["failing_index"] = *ss.failing_index;

  j["implications_summary"] =
      json{{"differentiability_implies_convexity",
            to_string(aggregate_remark(art.implications, rep.cond_i.holds, false))},
           {"ray_limit_implies_convexity",
            to_string(aggregate_remark(art.implications, rep.cond_i.holds, true))}};
  return j;
}

std::string points_csv(const Scenario& sc, const AnalysisArtifacts& art) {
  const int dim = sc.norm.dim;
  std::ostringstream out;
  out << "# " << kToolName << " points schema_version=" << kSchemaVersion << "\n";
  out << "index";
  for (int d = 0; d < dim; ++d) out << ",x" << d;
  out << ",skipped,skip_reason,distance,minimizer_clusters,gateaux_exists"
         ",ray_limit_value,ray_limit_pass,shell_slope_value,shell_slope_pass"
         ",subdiff_verdict,impl_differentiability,impl_ray_limit\n";
  for (std::size_t i = 0; i < art.report.points.size(); ++i) {
    const PointReport& p = art.report.points[i];
    const ImplicationChecks& imp = art.implications[i];
    out << p.index;
    for (int d = 0; d < dim; ++d) out << "," << format_double(p.x[d]);
    out << "," << (p.skipped ? 1 : 0) << "," << p.skip_reason << ","
        << format_double(p.distance) << "," << p.minimizer_clusters;
    if (p.skipped) {
      out << ",,,,,,";
    } else {
      out << "," << (p.cond_iii.exists ? 1 : 0) << ","
          << format_double(p.cond_iv.estimate.value) << ","
          << (p.cond_iv.pass ? 1 : 0) << ","
          << format_double(p.cond_v.estimate.value) << ","
          << (p.cond_v.pass ? 1 : 0) << "," << subdiff_str(p.subdiff.verdict);
    }
    out << "," << to_string(imp.differentiability_implies_convexity) << ","
        << to_string(imp.ray_limit_implies_convexity) << "\n";
  }
  return out.str();
}

namespace {

// Shared wrapper: input/configuration problems exit with 3.
template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int cmd_analyze(const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed, std::optional<double> tol) {
  return guarded([&]() -> int {
    const auto t0 = std::chrono::steady_clock::now();
    const ScenarioConfig cfg = load_config(config_path);
    const Scenario sc = build_scenario(cfg, seed, tol);
    const AnalysisArtifacts art = run_analysis(sc);
    const json rep = build_report_json(cfg, sc, art);
    std::filesystem::create_directories(out_dir);
    write_text(out_dir + "/report.json", rep.dump(2) + "\n");
    write_text(out_dir + "/points.csv", points_csv(sc, art));
    // Wall time goes to stderr so identical runs produce byte-identical
    // artifacts and stdout.
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    std::cerr << "analyze: " << sc.name << " finished in " << ms << " ms\n";
    std::cout << "scenario=" << sc.name
              << " verdict=" << to_string(art.report.verdict.status)
              << " slope_scan=" << to_string(art.slope_scan.status)
              << " report=" << out_dir << "/report.json\n";
    const bool midpoint_convex = art.report.cond_i.holds;
    const bool violation =
        art.report.verdict.status == VerdictStatus::Violation ||
        art.slope_scan.status == SlopeScanStatus::Violation ||
        aggregate_remark(art.implications, midpoint_convex, false) ==
            RemarkStatus::Violation ||
        aggregate_remark(art.implications, midpoint_convex, true) ==
            RemarkStatus::Violation;
    if (violation) return 2;
    if (art.report.verdict.status == VerdictStatus::HypothesisFailed) return 1;
    return 0;
  });
}

int cmd_norm_info(const NormSpec& spec, const std::optional<Vec>& point) {
  return guarded([&]() -> int {
    validate(spec);
    const NormSpec dual = dual_space(spec);
    std::cout << "norm: " << norm_label(spec) << "\n";
    std::cout << "dim: " << spec.dim << "\n";
    std::cout << "dual: " << norm_label(dual) << "\n";
    const RotundityReport rot = is_strictly_convex(spec);
    const RotundityReport drot = is_strictly_convex(dual);
    std::cout << "strictly_convex: " << (rot.strictly_convex ? "yes" : "no") << "\n";
    std::cout << "dual_strictly_convex: " << (drot.strictly_convex ? "yes" : "no")
              << "\n";
    if (rot.witness)
      std::cout << "rotundity_witness: " << join_coords(rot.witness->first) << " "
                << join_coords(rot.witness->second) << "\n";
    if (rot.contradiction || drot.contradiction)
      std::cerr << "warning: sampling contradicted the analytic rotundity verdict\n";
    if (point) {
      if (dim_of(*point) != spec.dim)
        throw std::invalid_argument("point dimension does not match the norm");
      std::cout << "point: " << join_coords(*point) << "\n";
      std::cout << "norm_value: " << format_double(norm_value(spec, *point)) << "\n";
      const bool zero = std::all_of(point->begin(), point->end(),
                                    [](double c) { return c == 0.0; });
      if (zero) {
        std::cout << "smooth_at_point: n/a (x = 0)\n";
      } else {
        const SmoothnessReport sm = is_smooth_at(spec, *point);
        std::cout << "smooth_at_point: " << (sm.smooth ? "yes" : "no") << "\n";
        const std::vector<Functional> fs = support_functionals(spec, *point);
        std::cout << "support_functionals: " << fs.size() << "\n";
        const std::size_t shown = std::min<std::size_t>(fs.size(), 4);
        for (std::size_t i = 0; i < shown; ++i)
          std::cout << "  f[" << i << "]: " << join_coords(fs[i].coords) << "\n";
        if (fs.size() > shown)
          std::cout << "  ... (" << fs.size() - shown << " more)\n";
      }
    }
    return 0;
  });
}

int cmd_chebyshev_scan(const std::string& config_path, const std::string& out_dir,
                       std::optional<std::uint64_t> seed, std::optional<double> tol) {
  return guarded([&]() -> int {
    const ScenarioConfig cfg = load_config(config_path);
    const Scenario sc = build_scenario(cfg, seed, tol);
    const std::size_t n = sc.grid.size();
    std::vector<NearestPointResult> res(n);
    std::vector<std::string> errors(n);
    kernels::for_each_index(static_cast<std::int64_t>(n), [&](std::int64_t i) {
      try {
        res[static_cast<std::size_t>(i)] =
            distance(sc.set, sc.grid[static_cast<std::size_t>(i)], sc.norm);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(i)] = e.what();
      }
    });
    for (const std::string& msg : errors)
      if (!msg.empty()) throw SolverError("chebyshev scan: " + msg);

    const int dim = sc.norm.dim;
    std::ostringstream grid_csv;
    grid_csv << "# " << kToolName << " chebyshev schema_version=" << kSchemaVersion
             << "\n";
    grid_csv << "index";
    for (int d = 0; d < dim; ++d) grid_csv << ",x" << d;
    grid_csv << ",distance,minimizer_clusters,unique\n";
    std::ostringstream wit_csv;
    wit_csv << "# " << kToolName << " chebyshev witnesses schema_version="
            << kSchemaVersion << "\n";
    wit_csv << "grid_index,minimizer_index";
    for (int d = 0; d < dim; ++d) wit_csv << ",m" << d;
    wit_csv << "\n";
    std::size_t witnesses = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const NearestPointResult& r = res[i];
      if (!r.converged)
        throw SolverError("chebyshev scan: solver did not converge at grid point " +
                          std::to_string(i));
      grid_csv << i;
      for (int d = 0; d < dim; ++d) grid_csv << "," << format_double(sc.grid[i][d]);
      grid_csv << "," << format_double(r.distance) << "," << r.cluster_count << ","
               << (r.cluster_count <= 1 ? 1 : 0) << "\n";
      if (r.cluster_count > 1) {
        ++witnesses;
        for (std::size_t m = 0; m < r.minimizers.size(); ++m) {
          wit_csv << i << "," << m;
          for (int d = 0; d < dim; ++d)
            wit_csv << "," << format_double(r.minimizers[m][d]);
          wit_csv << "\n";
        }
      }
    }
    std::filesystem::create_directories(out_dir);
    write_text(out_dir + "/chebyshev.csv", grid_csv.str());
    write_text(out_dir + "/chebyshev_witnesses.csv", wit_csv.str());
    std::cout << "scenario=" << sc.name
              << " chebyshev=" << (witnesses == 0 ? "true" : "false")
              << " witnesses=" << witnesses << " out=" << out_dir << "\n";
    return witnesses == 0 ? 0 : 1;
  });
}

int cmd_plot_data(const std::string& config_path, const std::string& out_dir,
                  std::optional<std::uint64_t> seed, std::optional<double> tol) {
  return guarded([&]() -> int {
    const ScenarioConfig cfg = load_config(config_path);
    const Scenario sc = build_scenario(cfg, seed, tol);
    if (sc.norm.dim != 2) {
      std::cerr << "error: plot-data requires a 2-D scenario (got dim "
                << sc.norm.dim << ")\n";
      return 3;
    }
    PlotSpec plot;
    if (cfg.plot) {
      plot = *cfg.plot;
    } else {
      plot.lo = sc.region.lo;
      plot.hi = sc.region.hi;
      plot.counts = {41, 41};
    }
    const int nx = plot.counts[0];
    const int ny = plot.counts[1];
    const std::int64_t total = static_cast<std::int64_t>(nx) * ny;
    std::vector<double> values(static_cast<std::size_t>(total));
    std::vector<std::string> errors(static_cast<std::size_t>(total));
    kernels::for_each_index(total, [&](std::int64_t f) {
      const int ix = static_cast<int>(f / ny);
      const int iy = static_cast<int>(f % ny);
      Vec x{plot.lo[0] + (plot.hi[0] - plot.lo[0]) * (static_cast<double>(ix) / (nx - 1)),
            plot.lo[1] + (plot.hi[1] - plot.lo[1]) * (static_cast<double>(iy) / (ny - 1))};
      try {
        values[static_cast<std::size_t>(f)] = distance(sc.set, x, sc.norm).distance;
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(f)] = e.what();
      }
    });
    for (const std::string& msg : errors)
      if (!msg.empty()) throw SolverError("plot grid: " + msg);

    std::ostringstream field_csv;
    field_csv << "# " << kToolName << " plot schema_version=" << kSchemaVersion
              << "\n";
    field_csv << "x0,x1,distance\n";
    for (std::int64_t f = 0; f < total; ++f) {
      const int ix = static_cast<int>(f / ny);
      const int iy = static_cast<int>(f % ny);
      const double x0 =
          plot.lo[0] + (plot.hi[0] - plot.lo[0]) * (static_cast<double>(ix) / (nx - 1));
      const double x1 =
          plot.lo[1] + (plot.hi[1] - plot.lo[1]) * (static_cast<double>(iy) / (ny - 1));
      field_csv << format_double(x0) << "," << format_double(x1) << ","
                << format_double(values[static_cast<std::size_t>(f)]) << "\n";
    }

    std::ostringstream grid_csv;
    grid_csv << "# " << kToolName << " plot grid schema_version=" << kSchemaVersion
             << "\n";
    grid_csv << "index,x0,x1,distance,minimizer_clusters,m0,m1\n";
    for (std::size_t i = 0; i < sc.grid.size(); ++i) {
      const NearestPointResult r = distance(sc.set, sc.grid[i], sc.norm);
      grid_csv << i << "," << format_double(sc.grid[i][0]) << ","
               << format_double(sc.grid[i][1]) << "," << format_double(r.distance)
               << "," << r.cluster_count;
      if (!r.minimizers.empty())
        grid_csv << "," << format_double(r.minimizers[0][0]) << ","
                 << format_double(r.minimizers[0][1]);
      else
        grid_csv << ",,";
      grid_csv << "\n";
    }

    std::filesystem::create_directories(out_dir);
    write_text(out_dir + "/plot_distance.csv", field_csv.str());
    write_text(out_dir + "/plot_grid.csv", grid_csv.str());
    std::cout << "scenario=" << sc.name << " nodes=" << total << " out=" << out_dir
              << "\n";
    return 0;
  });
}

}  // namespace chebylab
