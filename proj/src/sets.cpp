#include "chebylab/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "chebylab/kernels.hpp"
#include "chebylab/rng.hpp"

namespace chebylab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double weight_at(const NormSpec& s, int i) {
  return s.kind == NormKind::WeightedLp ? s.weights[static_cast<std::size_t>(i)]
                                        : 1.0;
}

double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

// ---------------------------------------------------------------- clusters

struct Clusters {
  std::vector<Vec> reps;
  int count = 0;
};

// Greedy order-preserving clustering; candidates within delta (ambient norm)
// of an existing representative are absorbed.
Clusters cluster_points(const std::vector<Vec>& cands, const NormSpec& space,
                        double delta, std::size_t cap) {
  Clusters c;
  std::vector<Vec> all_reps;
  for (const Vec& v : cands) {
    bool absorbed = false;
    for (const Vec& r : all_reps) {
      if (norm_value(space, sub(v, r)) <= delta) {
        absorbed = true;
        break;
      }
    }
    if (!absorbed) {
      all_reps.push_back(v);
      ++c.count;
      if (c.reps.size() < cap) c.reps.push_back(v);
    }
  }
  return c;
}

// ------------------------------------------------------------- 2-D hulls

double cross3(const Vec& o, const Vec& a, const Vec& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

std::vector<Vec> hull_2d(std::vector<Vec> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
    return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<Vec> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower
    while (k >= 2 && cross3(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper
    while (k >= t && cross3(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);  // CCW by construction
  return h;
}

bool inside_hull_2d(const std::vector<Vec>& hull, const Vec& x) {
  const double tol = 1e-12 * (1.0 + l2(x));
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec& a = hull[i];
    const Vec& b = hull[(i + 1) % hull.size()];
    double len = l2(sub(b, a));
    if (len == 0.0) continue;
    if (cross3(a, b, x) / len < -tol) return false;
  }
  return true;
}

// -------------------------------------------------- 1-D edge minimization
//
// h(s) = || c - s u || on [0, 1] is convex; its one-sided slopes have closed
// forms for every p, so the minimizing interval [sL, sR] is found by
// bisection on the slope sign.  This is what makes 2-D polytope / polyline
// distances accurate to machine precision (difference quotients of the
// distance field are taken at steps down to ~1e-10).

double edge_slope(const NormSpec& spec, const Vec& c, const Vec& u, double s,
                  bool left_side) {
  const int d = dim_of(c);
  if (spec.is_inf()) {
    double m = 0.0;
    for (int i = 0; i < d; ++i)
      m = std::max(m, weight_at(spec, i) * std::abs(c[static_cast<std::size_t>(i)] -
                                                    s * u[static_cast<std::size_t>(i)]));
    const double atol = 1e-13 * (1.0 + m);
    double slope = left_side ? kInf : -kInf;
    for (int i = 0; i < d; ++i) {
      double w = weight_at(spec, i);
      double delta = c[static_cast<std::size_t>(i)] - s * u[static_cast<std::size_t>(i)];
      if (w * std::abs(delta) < m - atol) continue;
      double ui = u[static_cast<std::size_t>(i)];
      double si;
      if (delta == 0.0)
        si = left_side ? -w * std::abs(ui) : w * std::abs(ui);
      else
        si = -w * sgn(delta) * ui;
      slope = left_side ? std::min(slope, si) : std::max(slope, si);
    }
    return slope;
  }
  if (spec.p == 1.0) {
    double slope = 0.0;
    for (int i = 0; i < d; ++i) {
      double w = weight_at(spec, i);
      double delta = c[static_cast<std::size_t>(i)] - s * u[static_cast<std::size_t>(i)];
      double ui = u[static_cast<std::size_t>(i)];
      if (delta == 0.0)
        slope += left_side ? -w * std::abs(ui) : w * std::abs(ui);
      else
        slope += -w * sgn(delta) * ui;
    }
    return slope;
  }
  // 1 < p < inf: smooth; the sign of d/ds sum w |delta|^p is what matters.
  double acc = 0.0;
  for (int i = 0; i < d; ++i) {
    double w = weight_at(spec, i);
    double delta = c[static_cast<std::size_t>(i)] - s * u[static_cast<std::size_t>(i)];
    if (delta == 0.0) continue;
    acc += -w * sgn(delta) * std::pow(std::abs(delta), spec.p - 1.0) *
           u[static_cast<std::size_t>(i)];
  }
  return acc;
}

struct EdgeMin {
  double sL = 0.0;
  double sR = 0.0;
  double value = 0.0;
};

EdgeMin edge_min(const NormSpec& spec, const Vec& x, const Vec& a, const Vec& b) {
  const Vec c = sub(x, a);
  const Vec u = sub(b, a);
  auto h = [&](double s) { return norm_value(spec, sub(c, scaled(u, s))); };
  EdgeMin em;
  if (l2(u) == 0.0) {
    em.value = h(0.0);
    return em;
  }
  const double rp0 = edge_slope(spec, c, u, 0.0, /*left=*/false);
  const double lp1 = edge_slope(spec, c, u, 1.0, /*left=*/true);

  if (rp0 >= 0.0) {
    em.sL = 0.0;
  } else if (lp1 <= 0.0) {
    em.sL = 1.0;
  } else {
    double lo = 0.0, hi = 1.0;  // slope < 0 at lo, >= 0 at hi
    for (int it = 0; it < 90; ++it) {
      double mid = 0.5 * (lo + hi);
      if (edge_slope(spec, c, u, mid, false) >= 0.0)
        hi = mid;
      else
        lo = mid;
    }
    em.sL = hi;
  }
  if (lp1 <= 0.0) {
    em.sR = 1.0;
  } else if (rp0 >= 0.0) {
    em.sR = 0.0;
  } else {
    double lo = 0.0, hi = 1.0;  // left slope <= 0 at lo, > 0 at hi
    for (int it = 0; it < 90; ++it) {
      double mid = 0.5 * (lo + hi);
      if (edge_slope(spec, c, u, mid, true) <= 0.0)
        lo = mid;
      else
        hi = mid;
    }
    em.sR = lo;
  }
  if (em.sR < em.sL) em.sR = em.sL;
  em.value = std::min(h(em.sL), h(em.sR));
  return em;
}

struct Segment {
  Vec a;
  Vec b;
};

NearestPointResult polyline_min(const NormSpec& spec, const Vec& x,
                                const std::vector<Segment>& segs,
                                const DistanceOptions& opts,
                                const std::string& method) {
  NearestPointResult r;
  r.method = method;
  std::vector<EdgeMin> ems(segs.size());
  double best = kInf;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    ems[i] = edge_min(spec, x, segs[i].a, segs[i].b);
    best = std::min(best, ems[i].value);
    r.iterations += 180;
  }
  std::vector<Vec> cands;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (ems[i].value > best + opts.value_tol) continue;
    const Vec u = sub(segs[i].b, segs[i].a);
    cands.push_back(axpy(segs[i].a, ems[i].sL, u));
    if (ems[i].sR - ems[i].sL > 1e-12)
      cands.push_back(axpy(segs[i].a, ems[i].sR, u));
  }
  Clusters cl = cluster_points(cands, spec, opts.cluster_delta, opts.max_minimizers);
  r.distance = best;
  r.minimizers = std::move(cl.reps);
  r.cluster_count = cl.count;
  r.certified_error = 1e-13 * (1.0 + best);
  return r;
}

// Corner points of the norm ball boundary for p in {1, inf} (2-D), CCW.
std::vector<Vec> ball_corners_2d(const NormSpec& spec, const Vec& c, double r) {
  std::vector<Vec> out;
  if (spec.is_inf()) {
    double a = r / weight_at(spec, 0), b = r / weight_at(spec, 1);
    out = {{c[0] + a, c[1] - b},
           {c[0] + a, c[1] + b},
           {c[0] - a, c[1] + b},
           {c[0] - a, c[1] - b}};
  } else {
    double a = r / weight_at(spec, 0), b = r / weight_at(spec, 1);
    out = {{c[0] + a, c[1]}, {c[0], c[1] + b}, {c[0] - a, c[1]}, {c[0], c[1] - b}};
  }
  return out;
}

// ------------------------------------------------- small dense linear solve

// Gaussian elimination with partial pivoting; returns false when singular.
bool solve_dense(std::vector<std::vector<double>>& A, std::vector<double>& rhs) {
  const std::size_t n = A.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    if (std::abs(A[piv][c]) < 1e-13) return false;
    std::swap(A[piv], A[c]);
    std::swap(rhs[piv], rhs[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  for (std::size_t c = 0; c < n; ++c) rhs[c] /= A[c][c];
  return true;
}

// Exact weighted-l2 nearest point via enumeration of vertex subsets (the
// minimizer lies in the relative interior of some face, whose affine hull
// projection it equals).
NearestPointResult polytope_faces_l2(const ConvexPolytope& poly, const Vec& x,
                                     const NormSpec& spec,
                                     const DistanceOptions& opts) {
  const std::vector<Vec>& V = poly.vertices;
  const std::size_t m = V.size();
  const int d = dim_of(x);
  if (m > 16)
    throw std::invalid_argument("polytope: face enumeration capped at 16 vertices");
  auto wdot = [&](const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
      s += weight_at(spec, i) * a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
    return s;
  };
  NearestPointResult r;
  r.method = "polytope.faces";
  double best = kInf;
  std::vector<Vec> cands;
  std::vector<double> values;
  const std::size_t max_size = static_cast<std::size_t>(d) + 1;
  for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < m; ++j)
      if ((mask >> j) & 1u) idx.push_back(j);
    if (idx.size() > max_size) continue;
    ++r.iterations;
    const std::size_t k = idx.size();
    const Vec& vk = V[idx[k - 1]];
    Vec y;  // candidate point
    std::vector<double> lambda(k, 0.0);
    if (k == 1) {
      y = vk;
      lambda[0] = 1.0;
    } else {
      // minimize ||x - vk - B beta||_w over beta, B columns v_j - vk
      std::vector<Vec> B;
      for (std::size_t j = 0; j + 1 < k; ++j) B.push_back(sub(V[idx[j]], vk));
      const Vec rhs_vec = sub(x, vk);
      std::vector<std::vector<double>> G(k - 1, std::vector<double>(k - 1));
      std::vector<double> rhs(k - 1);
      for (std::size_t a = 0; a + 1 < k; ++a) {
        for (std::size_t b = 0; b + 1 < k; ++b) G[a][b] = wdot(B[a], B[b]);
        rhs[a] = wdot(B[a], rhs_vec);
      }
      if (!solve_dense(G, rhs)) continue;  // degenerate subset; covered elsewhere
      double sum = 0.0;
      for (std::size_t j = 0; j + 1 < k; ++j) {
        lambda[j] = rhs[j];
        sum += rhs[j];
      }
      lambda[k - 1] = 1.0 - sum;
      y = Vec(static_cast<std::size_t>(d), 0.0);
      for (std::size_t j = 0; j < k; ++j)
        y = axpy(y, lambda[j], V[idx[j]]);
    }
    bool feasible = true;
    for (double l : lambda)
      if (l < -1e-9) feasible = false;
    if (!feasible) continue;
    double val = norm_value(spec, sub(x, y));
    if (val < best) best = val;
    cands.push_back(std::move(y));
    values.push_back(val);
  }
  std::vector<Vec> near;
  for (std::size_t i = 0; i < cands.size(); ++i)
    if (values[i] <= best + opts.value_tol) near.push_back(cands[i]);
  Clusters cl = cluster_points(near, spec, opts.cluster_delta, opts.max_minimizers);
  r.distance = best;
  r.minimizers = std::move(cl.reps);
  r.cluster_count = cl.count;
  r.certified_error = 1e-9 * (1.0 + best);
  return r;
}

// Away-step Frank-Wolfe on g(lambda) = sum_i w_i |x - V lambda|_i^p for
// smooth p in (1, inf), with the duality gap converted into a certified
// error bound on the distance itself.
NearestPointResult polytope_frank_wolfe(const ConvexPolytope& poly, const Vec& x,
                                        const NormSpec& spec,
                                        const DistanceOptions& opts) {
  (void)opts;  // a single minimizer is reported; clustering has no role here
  const std::vector<Vec>& V = poly.vertices;
  const std::size_t m = V.size();
  const int d = dim_of(x);
  const double p = spec.p;

  auto residual = [&](const std::vector<double>& lam) {
    Vec r = x;
    for (std::size_t j = 0; j < m; ++j)
      if (lam[j] != 0.0) r = axpy(r, -lam[j], V[j]);
    return r;
  };
  auto gval = [&](const Vec& r) {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
      s += weight_at(spec, i) * std::pow(std::abs(r[static_cast<std::size_t>(i)]), p);
    return s;
  };

  std::vector<double> lam(m, 0.0);
  {  // start at the nearest vertex
    std::size_t j0 = 0;
    double bv = kInf;
    for (std::size_t j = 0; j < m; ++j) {
      double v = norm_value(spec, sub(x, V[j]));
      if (v < bv) {
        bv = v;
        j0 = j;
      }
    }
    lam[j0] = 1.0;
  }

  NearestPointResult out;
  out.method = "polytope.fw";
  out.converged = false;
  double dist = 0.0, cert = kInf;
  for (int it = 0; it < 20000; ++it) {
    out.iterations = it;
    Vec r = residual(lam);
    double g = gval(r);
    dist = std::pow(g, 1.0 / p);
    // gradient wrt lambda
    Vec dg(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      double ri = r[static_cast<std::size_t>(i)];
      dg[static_cast<std::size_t>(i)] =
          ri == 0.0 ? 0.0
                    : weight_at(spec, i) * p * sgn(ri) * std::pow(std::abs(ri), p - 1.0);
    }
    std::vector<double> grad(m);
    for (std::size_t j = 0; j < m; ++j) grad[j] = -dot(dg, V[j]);
    std::size_t s = 0, a = 0;
    bool have_a = false;
    for (std::size_t j = 0; j < m; ++j) {
      if (grad[j] < grad[s]) s = j;
      if (lam[j] > 0.0 && (!have_a || grad[j] > grad[a])) {
        a = j;
        have_a = true;
      }
    }
    double glam = 0.0;
    for (std::size_t j = 0; j < m; ++j) glam += grad[j] * lam[j];
    double gap = glam - grad[s];
    double lower = std::max(g - gap, 0.0);
    cert = dist - std::pow(lower, 1.0 / p);
    if (gap <= 1e-14 * (1.0 + std::abs(g)) || cert <= 1e-9 * (1.0 + dist)) {
      out.converged = true;
      break;
    }
    // choose FW or away direction
    std::vector<double> dir(m, 0.0);
    double gmax = 1.0;
    bool away = have_a && lam[a] < 1.0 &&
                (glam - grad[s]) < (grad[a] - glam);
    if (away) {
      for (std::size_t j = 0; j < m; ++j) dir[j] = lam[j];
      dir[a] -= 1.0;
      gmax = lam[a] / (1.0 - lam[a]);
    } else {
      for (std::size_t j = 0; j < m; ++j) dir[j] = -lam[j];
      dir[s] += 1.0;
    }
    // exact line search by bisection on the directional derivative
    Vec vdir(static_cast<std::size_t>(d), 0.0);
    for (std::size_t j = 0; j < m; ++j)
      if (dir[j] != 0.0) vdir = axpy(vdir, dir[j], V[j]);
    auto dphi = [&](double t) {
      double sacc = 0.0;
      for (int i = 0; i < d; ++i) {
        double ri = r[static_cast<std::size_t>(i)] - t * vdir[static_cast<std::size_t>(i)];
        if (ri == 0.0) continue;
        sacc += weight_at(spec, i) * p * sgn(ri) * std::pow(std::abs(ri), p - 1.0) *
                (-vdir[static_cast<std::size_t>(i)]);
      }
      return sacc;
    };
    double t = gmax;
    if (dphi(gmax) > 0.0) {
      double lo = 0.0, hi = gmax;
      for (int k = 0; k < 70; ++k) {
        double mid = 0.5 * (lo + hi);
        if (dphi(mid) > 0.0)
          hi = mid;
        else
          lo = mid;
      }
      t = 0.5 * (lo + hi);
    }
    for (std::size_t j = 0; j < m; ++j) {
      lam[j] += t * dir[j];
      if (lam[j] < 1e-15) lam[j] = 0.0;
    }
    double sum = 0.0;
    for (double l : lam) sum += l;
    for (double& l : lam) l /= sum;
  }
  Vec y(static_cast<std::size_t>(d), 0.0);
  for (std::size_t j = 0; j < m; ++j)
    if (lam[j] != 0.0) y = axpy(y, lam[j], V[j]);
  out.distance = norm_value(spec, sub(x, y));
  out.minimizers = {y};
  out.cluster_count = 1;
  out.certified_error = std::max(cert, 0.0);
  if (!out.converged)
    out.method += " (gap target not reached)";
  return out;
}

NearestPointResult point_cloud_distance(const PointCloud& cloud, const Vec& x,
                                        const NormSpec& spec,
                                        const DistanceOptions& opts) {
  const std::int64_t n = static_cast<std::int64_t>(cloud.points.size());
  std::vector<double> vals(static_cast<std::size_t>(n));
  kernels::for_each_index(n, [&](std::int64_t i) {
    vals[static_cast<std::size_t>(i)] =
        norm_value(spec, sub(x, cloud.points[static_cast<std::size_t>(i)]));
  });
  NearestPointResult r;
  r.method = "cloud.scan";
  r.iterations = static_cast<int>(n);
  double best = kInf;
  for (double v : vals) best = std::min(best, v);
  std::vector<Vec> near;
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (vals[i] <= best + opts.value_tol) near.push_back(cloud.points[i]);
  Clusters cl = cluster_points(near, spec, opts.cluster_delta, opts.max_minimizers);
  r.distance = best;
  r.minimizers = std::move(cl.reps);
  r.cluster_count = cl.count;
  r.certified_error = 1e-14 * (1.0 + best);
  return r;
}

NearestPointResult half_space_distance(const HalfSpace& hs, const Vec& x,
                                       const NormSpec& spec,
                                       const DistanceOptions& opts) {
  NearestPointResult r;
  const double slack = pair(hs.a, x) - hs.b;
  if (slack <= 0.0) {
    r.distance = 0.0;
    r.minimizers = {x};
    r.cluster_count = 1;
    r.method = "halfspace.inside";
    return r;
  }
  const double an = dual_norm_value(spec, hs.a);
  const double d = slack / an;
  std::vector<Vec> cands;
  for (const Vec& u : norming_vectors(spec, hs.a)) cands.push_back(axpy(x, -d, u));
  Clusters cl = cluster_points(cands, spec, opts.cluster_delta, opts.max_minimizers);
  r.distance = d;
  r.minimizers = std::move(cl.reps);
  r.cluster_count = cl.count;
  r.certified_error = 1e-13 * (1.0 + d);
  r.method = "halfspace.affine";
  return r;
}

NearestPointResult polytope_distance(const ConvexPolytope& poly, const Vec& x,
                                     const NormSpec& spec,
                                     const DistanceOptions& opts);

NearestPointResult ball_distance(const Ball& ball, const Vec& x,
                                 const NormSpec& spec,
                                 const DistanceOptions& opts) {
  NearestPointResult r;
  const Vec rad = sub(x, ball.center);
  const double delta = norm_value(spec, rad);
  if (delta <= ball.radius) {
    r.distance = 0.0;
    r.minimizers = {x};
    r.cluster_count = 1;
    r.method = "ball.inside";
    return r;
  }
  const double d = delta - ball.radius;
  if (!spec.is_inf() && spec.p > 1.0) {
    r.distance = d;
    r.minimizers = {axpy(ball.center, ball.radius / delta, rad)};
    r.cluster_count = 1;
    r.certified_error = 1e-13 * (1.0 + d);
    r.method = "ball.radial";
    return r;
  }
  if (spec.dim == 2) {
    // p in {1, inf}: the ball is a polygon; reuse the edge solver so
    // non-unique nearest points are reported.
    ConvexPolytope hull{ball_corners_2d(spec, ball.center, ball.radius)};
    r = polytope_distance(hull, x, spec, opts);
    r.method = "ball.hull_edges";
    return r;
  }
  // distance is exact in any norm; only multiplicity goes unprobed here.
  r.distance = d;
  r.minimizers = {axpy(ball.center, ball.radius / delta, rad)};
  r.cluster_count = 1;
  r.certified_error = 1e-13 * (1.0 + d);
  r.method = "ball.radial";
  return r;
}

NearestPointResult sphere_distance(const Sphere& sph, const Vec& x,
                                   const NormSpec& spec,
                                   const DistanceOptions& opts) {
  NearestPointResult r;
  const Vec rad = sub(x, sph.center);
  const double delta = norm_value(spec, rad);
  const double d = std::abs(delta - sph.radius);
  if (delta <= 1e-14 * (1.0 + sph.radius)) {
    // centre: every point of the sphere is nearest; report axis-aligned
    // representatives.
    std::vector<Vec> cands;
    for (int i = 0; i < spec.dim; ++i) {
      Vec e = basis_vec(spec.dim, i);
      double ne = norm_value(spec, e);
      cands.push_back(axpy(sph.center, sph.radius / ne, e));
      cands.push_back(axpy(sph.center, -sph.radius / ne, e));
    }
    Clusters cl = cluster_points(cands, spec, opts.cluster_delta, opts.max_minimizers);
    r.distance = sph.radius;
    r.minimizers = std::move(cl.reps);
    r.cluster_count = cl.count;
    r.certified_error = 1e-13 * (1.0 + sph.radius);
    r.method = "sphere.center";
    return r;
  }
  if (!spec.is_inf() && spec.p > 1.0) {
    r.distance = d;
    r.minimizers = {axpy(sph.center, sph.radius / delta, rad)};
    r.cluster_count = 1;
    r.certified_error = 1e-13 * (1.0 + d);
    r.method = "sphere.radial";
    return r;
  }
  if (spec.dim == 2) {
    std::vector<Vec> corners = ball_corners_2d(spec, sph.center, sph.radius);
    std::vector<Segment> segs;
    for (std::size_t i = 0; i < corners.size(); ++i)
      segs.push_back({corners[i], corners[(i + 1) % corners.size()]});
    r = polyline_min(spec, x, segs, opts, "sphere.boundary");
    return r;
  }
  r.distance = d;
  r.minimizers = {axpy(sph.center, sph.radius / delta, rad)};
  r.cluster_count = 1;
  r.certified_error = 1e-13 * (1.0 + d);
  r.method = "sphere.radial";
  return r;
}

NearestPointResult polytope_distance(const ConvexPolytope& poly, const Vec& x,
                                     const NormSpec& spec,
                                     const DistanceOptions& opts) {
  const int d = spec.dim;
  if (d == 1) {
    double lo = kInf, hi = -kInf;
    for (const Vec& v : poly.vertices) {
      lo = std::min(lo, v[0]);
      hi = std::max(hi, v[0]);
    }
    NearestPointResult r;
    r.method = "polytope.interval";
    if (x[0] >= lo && x[0] <= hi) {
      r.minimizers = {x};
      r.cluster_count = 1;
      return r;
    }
    double e = x[0] < lo ? lo : hi;
    r.distance = norm_value(spec, {x[0] - e});
    r.minimizers = {{e}};
    r.cluster_count = 1;
    r.certified_error = 1e-14 * (1.0 + r.distance);
    return r;
  }
  if (d == 2) {
    std::vector<Vec> hull = hull_2d(poly.vertices);
    if (hull.size() == 1) {
      PointCloud pc{{hull[0]}};
      NearestPointResult r = point_cloud_distance(pc, x, spec, opts);
      r.method = "polytope.vertex";
      return r;
    }
    if (hull.size() == 2) {
      std::vector<Segment> segs{{hull[0], hull[1]}};
      return polyline_min(spec, x, segs, opts, "polytope.edges");
    }
    if (inside_hull_2d(hull, x)) {
      NearestPointResult r;
      r.minimizers = {x};
      r.cluster_count = 1;
      r.method = "polytope.inside";
      return r;
    }
    std::vector<Segment> segs;
    for (std::size_t i = 0; i < hull.size(); ++i)
      segs.push_back({hull[i], hull[(i + 1) % hull.size()]});
    return polyline_min(spec, x, segs, opts, "polytope.edges");
  }
  // dim >= 3
  if (!spec.is_inf() && spec.p == 2.0) return polytope_faces_l2(poly, x, spec, opts);
  if (!spec.is_inf() && spec.p > 1.0) return polytope_frank_wolfe(poly, x, spec, opts);
  throw std::invalid_argument(
      "polytope: dim >= 3 supports p = 2 (face enumeration) or 1 < p < inf "
      "(Frank-Wolfe); p in {1, inf} is 2-D only");
}

NearestPointResult graph_distance(const FunctionGraph& g, const Vec& x,
                                  const NormSpec& spec,
                                  const DistanceOptions& opts) {
  const std::size_t n = g.values.size();
  const double step = (g.hi - g.lo) / static_cast<double>(n - 1);
  std::vector<Segment> segs;
  segs.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double s0 = g.lo + step * static_cast<double>(i);
    double s1 = g.lo + step * static_cast<double>(i + 1);
    segs.push_back({{s0, g.values[i]}, {s1, g.values[i + 1]}});
  }
  return polyline_min(spec, x, segs, opts, "graph.polyline");
}

NearestPointResult union_distance(const UnionSet& u, const Vec& x,
                                  const NormSpec& spec,
                                  const DistanceOptions& opts) {
  std::vector<NearestPointResult> parts;
  parts.reserve(u.parts.size());
  for (const SetSpec& s : u.parts) parts.push_back(distance(s, x, spec, opts));
  NearestPointResult r;
  r.method = "union(min)";
  double best = kInf;
  for (const NearestPointResult& p : parts) best = std::min(best, p.distance);
  std::vector<Vec> cands;
  double cert = 0.0;
  for (const NearestPointResult& p : parts) {
    r.iterations += p.iterations;
    r.converged = r.converged && p.converged;
    cert = std::max(cert, p.certified_error + best - p.distance);
    if (p.distance <= best + opts.value_tol)
      for (const Vec& m : p.minimizers) cands.push_back(m);
  }
  Clusters cl = cluster_points(cands, spec, opts.cluster_delta, opts.max_minimizers);
  r.distance = best;
  r.minimizers = std::move(cl.reps);
  r.cluster_count = cl.count;
  r.certified_error = std::max(cert, 0.0);
  return r;
}

}  // namespace

// ------------------------------------------------------------- validation

int set_dim(const SetSpec& set) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointCloud>)
          return s.points.empty() ? 0 : dim_of(s.points.front());
        else if constexpr (std::is_same_v<T, ConvexPolytope>)
          return s.vertices.empty() ? 0 : dim_of(s.vertices.front());
        else if constexpr (std::is_same_v<T, HalfSpace>)
          return dim_of(s.a.coords);
        else if constexpr (std::is_same_v<T, Ball> || std::is_same_v<T, Sphere>)
          return dim_of(s.center);
        else if constexpr (std::is_same_v<T, FunctionGraph>)
          return 2;
        else
          return s.parts.empty() ? 0 : set_dim(s.parts.front());
      },
      set);
}

int validate_set(const SetSpec& set) {
  const int d = set_dim(set);
  if (d < 1) throw std::invalid_argument("set: empty or zero-dimensional");
  std::visit(
      [d](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointCloud>) {
          if (s.points.empty()) throw std::invalid_argument("point cloud: empty");
          for (const Vec& p : s.points) {
            require_dim(p, d, "point cloud");
            require_finite(p, "point cloud");
          }
        } else if constexpr (std::is_same_v<T, ConvexPolytope>) {
          if (s.vertices.empty()) throw std::invalid_argument("polytope: no vertices");
          for (const Vec& p : s.vertices) {
            require_dim(p, d, "polytope");
            require_finite(p, "polytope");
          }
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          require_finite(s.a.coords, "half-space");
          if (!std::isfinite(s.b)) throw std::invalid_argument("half-space: bad offset");
          if (l2(s.a.coords) == 0.0)
            throw std::invalid_argument("half-space: zero functional");
        } else if constexpr (std::is_same_v<T, Ball> || std::is_same_v<T, Sphere>) {
          require_finite(s.center, "ball/sphere");
          if (!(s.radius > 0.0) || !std::isfinite(s.radius))
            throw std::invalid_argument("ball/sphere: radius must be positive");
        } else if constexpr (std::is_same_v<T, FunctionGraph>) {
          if (!(s.hi > s.lo)) throw std::invalid_argument("graph: needs hi > lo");
          if (s.values.size() < 2)
            throw std::invalid_argument("graph: needs at least two knots");
          for (double v : s.values)
            if (!std::isfinite(v)) throw std::invalid_argument("graph: non-finite value");
        } else {
          if (s.parts.empty()) throw std::invalid_argument("union: no parts");
          for (const SetSpec& part : s.parts)
            if (validate_set(part) != d)
              throw std::invalid_argument("union: mixed dimensions");
        }
      },
      set);
  return d;
}

std::vector<Vec> set_vertices(const SetSpec& set) {
  return std::visit(
      [](const auto& s) -> std::vector<Vec> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointCloud>)
          return s.points;
        else if constexpr (std::is_same_v<T, ConvexPolytope>)
          return s.vertices;
        else if constexpr (std::is_same_v<T, FunctionGraph>) {
          std::vector<Vec> out;
          const double step = (s.hi - s.lo) / static_cast<double>(s.values.size() - 1);
          for (std::size_t i = 0; i < s.values.size(); ++i)
            out.push_back({s.lo + step * static_cast<double>(i), s.values[i]});
          return out;
        } else if constexpr (std::is_same_v<T, UnionSet>) {
          std::vector<Vec> out;
          for (const SetSpec& part : s.parts)
            for (Vec& v : set_vertices(part)) out.push_back(std::move(v));
          return out;
        } else {
          return {};
        }
      },
      set);
}

std::optional<Box> set_bounds(const SetSpec& set, const NormSpec& space) {
  const int d = set_dim(set);
  auto from_points = [d](const std::vector<Vec>& pts) {
    Box b{Vec(static_cast<std::size_t>(d), kInf), Vec(static_cast<std::size_t>(d), -kInf)};
    for (const Vec& p : pts)
      for (int i = 0; i < d; ++i) {
        b.lo[static_cast<std::size_t>(i)] = std::min(b.lo[static_cast<std::size_t>(i)],
                                                     p[static_cast<std::size_t>(i)]);
        b.hi[static_cast<std::size_t>(i)] = std::max(b.hi[static_cast<std::size_t>(i)],
                                                     p[static_cast<std::size_t>(i)]);
      }
    return b;
  };
  return std::visit(
      [&](const auto& s) -> std::optional<Box> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointCloud>)
          return from_points(s.points);
        else if constexpr (std::is_same_v<T, ConvexPolytope>)
          return from_points(s.vertices);
        else if constexpr (std::is_same_v<T, HalfSpace>)
          return std::nullopt;
        else if constexpr (std::is_same_v<T, Ball> || std::is_same_v<T, Sphere>) {
          Box b{s.center, s.center};
          for (int i = 0; i < d; ++i) {
            double w = weight_at(space, i);
            // |v_i - c_i| <= r * w^(-1/p)  (r / w for the sup norm)
            double reach =
                space.is_inf() ? s.radius / w : s.radius * std::pow(w, -1.0 / space.p);
            b.lo[static_cast<std::size_t>(i)] -= reach;
            b.hi[static_cast<std::size_t>(i)] += reach;
          }
          return b;
        } else if constexpr (std::is_same_v<T, FunctionGraph>) {
          std::vector<Vec> pts = set_vertices(SetSpec{s});
          return from_points(pts);
        } else {
          Box b{Vec(static_cast<std::size_t>(d), kInf), Vec(static_cast<std::size_t>(d), -kInf)};
          for (const SetSpec& part : s.parts) {
            std::optional<Box> pb = set_bounds(part, space);
            if (!pb) return std::nullopt;
            for (int i = 0; i < d; ++i) {
              b.lo[static_cast<std::size_t>(i)] =
                  std::min(b.lo[static_cast<std::size_t>(i)], pb->lo[static_cast<std::size_t>(i)]);
              b.hi[static_cast<std::size_t>(i)] =
                  std::max(b.hi[static_cast<std::size_t>(i)], pb->hi[static_cast<std::size_t>(i)]);
            }
          }
          return b;
        }
      },
      set);
}

SolverClass solver_class(const SetSpec& set, const NormSpec& space) {
  return std::visit(
      [&](const auto& s) -> SolverClass {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConvexPolytope>) {
          if (space.dim <= 2) return SolverClass::Analytic;
          if (!space.is_inf() && space.p == 2.0) return SolverClass::Analytic;
          return SolverClass::Iterative;
        } else if constexpr (std::is_same_v<T, UnionSet>) {
          for (const SetSpec& part : s.parts)
            if (solver_class(part, space) == SolverClass::Iterative)
              return SolverClass::Iterative;
          return SolverClass::Analytic;
        } else {
          return SolverClass::Analytic;
        }
      },
      set);
}

std::string set_label(const SetSpec& set) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointCloud>)
          return "PointCloud(" + std::to_string(s.points.size()) + ")";
        else if constexpr (std::is_same_v<T, ConvexPolytope>)
          return "ConvexPolytope(" + std::to_string(s.vertices.size()) + ")";
        else if constexpr (std::is_same_v<T, HalfSpace>)
          return "HalfSpace";
        else if constexpr (std::is_same_v<T, Ball>)
          return "Ball";
        else if constexpr (std::is_same_v<T, Sphere>)
          return "Sphere";
        else if constexpr (std::is_same_v<T, FunctionGraph>)
          return "FunctionGraph(" + std::to_string(s.values.size()) + ")";
        else
          return "Union(" + std::to_string(s.parts.size()) + ")";
      },
      set);
}

NearestPointResult distance(const SetSpec& set, const Vec& x,
                            const NormSpec& space, const DistanceOptions& opts) {
  validate(space);
  const int d = validate_set(set);
  if (d != space.dim)
    throw std::invalid_argument("distance: set/space dimension mismatch");
  require_dim(x, d, "distance");
  require_finite(x, "distance");
  return std::visit(
      [&](const auto& s) -> NearestPointResult {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointCloud>)
          return point_cloud_distance(s, x, space, opts);
        else if constexpr (std::is_same_v<T, ConvexPolytope>)
          return polytope_distance(s, x, space, opts);
        else if constexpr (std::is_same_v<T, HalfSpace>)
          return half_space_distance(s, x, space, opts);
        else if constexpr (std::is_same_v<T, Ball>)
          return ball_distance(s, x, space, opts);
        else if constexpr (std::is_same_v<T, Sphere>)
          return sphere_distance(s, x, space, opts);
        else if constexpr (std::is_same_v<T, FunctionGraph>)
          return graph_distance(s, x, space, opts);
        else
          return union_distance(s, x, space, opts);
      },
      set);
}

namespace {

double brute_segment_scan(const NormSpec& spec, const Vec& x, const Vec& a,
                          const Vec& b, double resolution) {
  const double len = l2(sub(b, a));
  const std::int64_t n =
      std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(len / (0.5 * resolution))) + 1);
  const Vec u = sub(b, a);
  kernels::Best best = kernels::min_scan(n, [&](std::int64_t i) {
    double s = static_cast<double>(i) / static_cast<double>(n - 1);
    return norm_value(spec, sub(x, axpy(a, s, u)));
  });
  return best.value;
}

double brute_ball_boundary(const NormSpec& spec, const Vec& c, double r,
                           const Vec& x, double resolution) {
  if (spec.dim == 2) {
    const std::int64_t n = std::max<std::int64_t>(
        1024, static_cast<std::int64_t>(std::ceil(64.0 * std::max(r, 1.0) / resolution)));
    kernels::Best best = kernels::min_scan(n, [&](std::int64_t i) {
      double th = 6.283185307179586 * static_cast<double>(i) / static_cast<double>(n);
      Vec dir{std::cos(th), std::sin(th)};
      double nd = norm_value(spec, dir);
      return norm_value(spec, sub(x, axpy(c, r / nd, dir)));
    });
    return best.value;
  }
  RngStream rng(0x62727574u, "brute.sphere");
  const std::int64_t n = 200000;
  double best = kInf;
  for (std::int64_t i = 0; i < n; ++i) {
    Vec dir = rng.unit_l2(spec.dim);
    double nd = norm_value(spec, dir);
    best = std::min(best, norm_value(spec, sub(x, axpy(c, r / nd, dir))));
  }
  return best;
}

}  // namespace

double brute_force_distance(const SetSpec& set, const Vec& x,
                            const NormSpec& space, double resolution,
                            const std::optional<Box>& box) {
  validate(space);
  validate_set(set);
  if (!(resolution > 0.0))
    throw std::invalid_argument("brute_force_distance: resolution must be positive");
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointCloud>) {
          kernels::Best b = kernels::min_scan(
              static_cast<std::int64_t>(s.points.size()), [&](std::int64_t i) {
                return norm_value(space, sub(x, s.points[static_cast<std::size_t>(i)]));
              });
          return b.value;
        } else if constexpr (std::is_same_v<T, ConvexPolytope>) {
          if (space.dim == 2) {
            std::vector<Vec> hull = hull_2d(s.vertices);
            if (hull.size() >= 3 && inside_hull_2d(hull, x)) return 0.0;
            if (hull.size() == 1) return norm_value(space, sub(x, hull[0]));
            double best = kInf;
            for (std::size_t i = 0; i < hull.size(); ++i)
              best = std::min(best, brute_segment_scan(space, x, hull[i],
                                                       hull[(i + 1) % hull.size()],
                                                       resolution));
            return best;
          }
          // dim >= 3: seeded convex-combination sampling (validation only)
          RngStream rng(0x62727574u, "brute.polytope");
          double best = kInf;
          const std::size_t m = s.vertices.size();
          for (int k = 0; k < 200000; ++k) {
            std::vector<double> lam(m);
            double sum = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
              lam[j] = -std::log(1.0 - rng.uniform01());
              sum += lam[j];
            }
            Vec y(static_cast<std::size_t>(space.dim), 0.0);
            for (std::size_t j = 0; j < m; ++j)
              y = axpy(y, lam[j] / sum, s.vertices[j]);
            best = std::min(best, norm_value(space, sub(x, y)));
          }
          return best;
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          if (pair(s.a, x) - s.b <= 0.0) return 0.0;
          if (!box)
            throw std::invalid_argument(
                "brute_force_distance: half-space needs a bounding box");
          if (space.dim != 2)
            throw std::invalid_argument(
                "brute_force_distance: half-space sampling is 2-D only");
          // sample the boundary line through the euclidean foot point
          const Vec& a = s.a.coords;
          double a2 = dot(a, a);
          Vec foot = axpy(x, -(pair(s.a, x) - s.b) / a2, a);
          Vec t{-a[1], a[0]};
          t = scaled(t, 1.0 / l2(t));
          double L = l2(sub(box->hi, box->lo)) + l2(sub(x, foot)) + 1.0;
          return brute_segment_scan(space, x, axpy(foot, -L, t), axpy(foot, L, t),
                                    resolution);
        } else if constexpr (std::is_same_v<T, Ball>) {
          double delta = norm_value(space, sub(x, s.center));
          if (delta <= s.radius) return 0.0;
          return brute_ball_boundary(space, s.center, s.radius, x, resolution);
        } else if constexpr (std::is_same_v<T, Sphere>) {
          return brute_ball_boundary(space, s.center, s.radius, x, resolution);
        } else if constexpr (std::is_same_v<T, FunctionGraph>) {
          const std::size_t n = s.values.size();
          const double step = (s.hi - s.lo) / static_cast<double>(n - 1);
          double best = kInf;
          for (std::size_t i = 0; i + 1 < n; ++i) {
            Vec p0{s.lo + step * static_cast<double>(i), s.values[i]};
            Vec p1{s.lo + step * static_cast<double>(i + 1), s.values[i + 1]};
            best = std::min(best, brute_segment_scan(space, x, p0, p1, resolution));
          }
          return best;
        } else {
          double best = kInf;
          for (const SetSpec& part : s.parts)
            best = std::min(best, brute_force_distance(part, x, space, resolution, box));
          return best;
        }
      },
      set);
}

bool membership(const SetSpec& set, const Vec& v, const NormSpec& space,
                double tol) {
  return distance(set, v, space).distance <= tol;
}

ChebyshevReport is_chebyshev_on_grid(const SetSpec& set, const NormSpec& space,
                                     const std::vector<Vec>& grid, double tol) {
  ChebyshevReport rep;
  DistanceOptions opts;
  opts.value_tol = tol;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    NearestPointResult r = distance(set, grid[i], space, opts);
    if (!r.converged)
      throw SolverError("is_chebyshev_on_grid: solver did not converge at grid point " +
                        std::to_string(i));
    if (r.cluster_count >= 2) {
      rep.chebyshev = false;
      rep.witnesses.push_back({i, grid[i], r.minimizers});
    }
  }
  return rep;
}

}  // namespace chebylab
