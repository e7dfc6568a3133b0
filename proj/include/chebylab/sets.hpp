#pragma once

// Closed target sets and nearest-point solvers.  distance() returns the
// value, cluster representatives of the (possibly non-unique) nearest
// points, a certified error bound and solver diagnostics.  Solvers are
// exact where structure allows: affine formulas for half-spaces, radial
// formulas for balls/spheres, and one-sided-slope bisection along polyline
// edges for 2-D polytopes and piecewise-linear graphs.  Dim >= 3 polytopes
// use exact face enumeration for p = 2 and away-step Frank-Wolfe otherwise.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "chebylab/norms.hpp"
#include "chebylab/vec.hpp"

namespace chebylab {

struct PointCloud {
  std::vector<Vec> points;
};

// Convex hull of the listed vertices (the solid hull, not its boundary).
struct ConvexPolytope {
  std::vector<Vec> vertices;
};

// { v : <a, v> <= b }
struct HalfSpace {
  Functional a;
  double b = 0.0;
};

// Closed ball / sphere of the ambient norm.
struct Ball {
  Vec center;
  double radius = 1.0;
};

struct Sphere {
  Vec center;
  double radius = 1.0;
};

// Piecewise-linear graph {(s, g(s)) : s in [lo, hi]} with g sampled on
// equally spaced knots.  Lives in dimension 2.
struct FunctionGraph {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> values;
};

struct UnionSet;

using SetSpec = std::variant<PointCloud, ConvexPolytope, HalfSpace, Ball,
                             Sphere, FunctionGraph, UnionSet>;

struct UnionSet {
  std::vector<SetSpec> parts;
};

struct Box {
  Vec lo;
  Vec hi;
};

struct DistanceOptions {
  // Near-minimizers within value_tol of the optimum but further than
  // cluster_delta apart count as distinct (non-uniqueness evidence).
  double value_tol = 1e-6;
  double cluster_delta = 1e-3;
  std::size_t max_minimizers = 8;
};

struct NearestPointResult {
  double distance = 0.0;
  std::vector<Vec> minimizers;  // cluster representatives, capped
  int cluster_count = 0;        // total clusters found (may exceed the cap)
  double certified_error = 0.0;
  std::string method;
  int iterations = 0;
  bool converged = true;
};

enum class SolverClass { Analytic, Iterative };

// Validates invariants (non-emptiness, finite coords, radius > 0, matching
// dimensions, ...) and returns the ambient dimension.
int validate_set(const SetSpec& set);
int set_dim(const SetSpec& set);

// Vertex-like points of the set (cloud points, polytope vertices, graph
// knots); empty for half-spaces, balls and spheres.
std::vector<Vec> set_vertices(const SetSpec& set);

// Coordinate bounding box; nullopt for unbounded sets.  The ambient norm
// matters because ball/sphere reach per coordinate depends on it.
std::optional<Box> set_bounds(const SetSpec& set, const NormSpec& space);

SolverClass solver_class(const SetSpec& set, const NormSpec& space);

std::string set_label(const SetSpec& set);

NearestPointResult distance(const SetSpec& set, const Vec& x,
                            const NormSpec& space,
                            const DistanceOptions& opts = {});

// Independent dense-sampling estimate used for validation.  resolution is
// the sampling step; the result overestimates the true distance by at most
// O(resolution).  Unbounded sets need a bounding box.
double brute_force_distance(const SetSpec& set, const Vec& x,
                            const NormSpec& space, double resolution,
                            const std::optional<Box>& box = std::nullopt);

bool membership(const SetSpec& set, const Vec& v, const NormSpec& space,
                double tol = 1e-9);

struct ChebyshevWitness {
  std::size_t grid_index = 0;
  Vec point;
  std::vector<Vec> minimizers;
};

struct ChebyshevReport {
  bool chebyshev = true;  // every grid point has a unique minimizer cluster
  std::vector<ChebyshevWitness> witnesses;
};

// Throws SolverError if any per-point solve fails to converge.
ChebyshevReport is_chebyshev_on_grid(const SetSpec& set, const NormSpec& space,
                                     const std::vector<Vec>& grid,
                                     double tol = 1e-6);

}  // namespace chebylab
