#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "chebylab/norms.hpp"
#include "chebylab/rng.hpp"
#include "oracle_helpers.hpp"

using namespace chebylab;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("norm values against hand-computed cases") {
  CHECK(norm_value(NormSpec::lp(2.0, 2), {3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(norm_value(NormSpec::lp(1.0, 2), {1.0, -2.0}) == doctest::Approx(3.0));
  CHECK(norm_value(NormSpec::max_norm(2), {1.0, -2.0}) == doctest::Approx(2.0));
  // (sum 2*1 + 3*1)^(1/1.5) = 5^(2/3)
  CHECK(norm_value(NormSpec::weighted_lp(1.5, {2.0, 3.0}), {1.0, 1.0}) ==
        doctest::Approx(2.924017738212866).epsilon(1e-12));
  // ||(1,1)||_3 = 2^(1/3)
  CHECK(norm_value(NormSpec::lp(3.0, 2), {1.0, 1.0}) ==
        doctest::Approx(1.2599210498948732).epsilon(1e-12));
}

TEST_CASE("validation rejects malformed specs") {
  CHECK_THROWS_AS(NormSpec::lp(0.5, 2), std::invalid_argument);
  CHECK_THROWS_AS(NormSpec::lp(2.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(NormSpec::weighted_lp(2.0, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(NormSpec::weighted_lp(2.0, {}), std::invalid_argument);
  CHECK_THROWS_AS(norm_value(NormSpec::lp(2.0, 2), {1.0}), std::invalid_argument);
}

TEST_CASE("dual spaces follow the conjugate-exponent rules") {
  CHECK(dual_space(NormSpec::lp(3.0, 2)) == NormSpec::lp(1.5, 2));
  CHECK(dual_space(NormSpec::lp(1.0, 3)).is_inf());
  CHECK(dual_space(NormSpec::max_norm(2)).dual_exponent() == kInf);
  CHECK(dual_space(NormSpec::max_norm(2)).p == doctest::Approx(1.0));

  // weighted: dual weights w^(1-q) for finite p > 1
  const NormSpec w3 = NormSpec::weighted_lp(3.0, {8.0, 27.0});
  const NormSpec dual = dual_space(w3);
  CHECK(dual.p == doctest::Approx(1.5));
  CHECK(dual.weights[0] == doctest::Approx(0.3535533905932738).epsilon(1e-12));
  CHECK(dual.weights[1] == doctest::Approx(0.19245008972987526).epsilon(1e-12));
  // round trip comes back to the original
  const NormSpec back = dual_space(dual);
  CHECK(back.p == doctest::Approx(3.0));
  CHECK(back.weights[0] == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(back.weights[1] == doctest::Approx(27.0).epsilon(1e-12));

  // weighted p in {1, inf}: dual weights 1/w
  const NormSpec w1 = NormSpec::weighted_lp(1.0, {2.0, 4.0});
  CHECK(dual_space(w1).is_inf());
  CHECK(dual_space(w1).weights[0] == doctest::Approx(0.5));
  CHECK(dual_space(w1).weights[1] == doctest::Approx(0.25));
}

TEST_CASE("dual norm value: ||(1,1)||_{3/2} = 2^{2/3}") {
  const NormSpec space = NormSpec::lp(3.0, 2);
  const Functional f{{1.0, 1.0}};
  CHECK(dual_norm_value(space, f) ==
        doctest::Approx(1.5874010519681994).epsilon(1e-12));
  // independent dense-sampling oracle
  CHECK(oracle::dense_dual_norm(3.0, {}, {1.0, 1.0}) ==
        doctest::Approx(1.5874010519681994).epsilon(1e-4));
}

TEST_CASE("support functionals: smooth p") {
  const auto fs2 = support_functionals(NormSpec::lp(2.0, 2), {3.0, 4.0});
  REQUIRE(fs2.size() == 1);
  CHECK(fs2[0].coords[0] == doctest::Approx(0.6));
  CHECK(fs2[0].coords[1] == doctest::Approx(0.8));

  // p = 3 at (1,1): f_i = |x_i|^2 / ||x||^2 = 2^(-2/3)
  const auto fs3 = support_functionals(NormSpec::lp(3.0, 2), {1.0, 1.0});
  REQUIRE(fs3.size() == 1);
  CHECK(fs3[0].coords[0] == doctest::Approx(0.6299605249474366).epsilon(1e-12));
  CHECK(fs3[0].coords[1] == doctest::Approx(0.6299605249474366).epsilon(1e-12));

  CHECK_THROWS_AS(support_functionals(NormSpec::lp(2.0, 2), {0.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("support functionals: faces at p = 1 and p = inf") {
  // l1 at (1,0): the face is {(1, s) : |s| <= 1}; extremes (1, 1), (1, -1).
  const auto f1 = support_functionals(NormSpec::lp(1.0, 2), {1.0, 0.0});
  REQUIRE(f1.size() == 2);
  CHECK(f1[0].coords[0] == doctest::Approx(1.0));
  CHECK(std::fabs(f1[0].coords[1]) == doctest::Approx(1.0));
  CHECK(f1[1].coords[1] == doctest::Approx(-f1[0].coords[1]));

  // l1 at (1,-2): unique sign pattern
  const auto f1b = support_functionals(NormSpec::lp(1.0, 2), {1.0, -2.0});
  REQUIRE(f1b.size() == 1);
  CHECK(f1b[0].coords[0] == doctest::Approx(1.0));
  CHECK(f1b[0].coords[1] == doctest::Approx(-1.0));

  // max norm at (2,2): one functional per argmax coordinate
  const auto fm = support_functionals(NormSpec::max_norm(2), {2.0, 2.0});
  REQUIRE(fm.size() == 2);
  // max norm at (2,1): unique
  const auto fm2 = support_functionals(NormSpec::max_norm(2), {2.0, 1.0});
  REQUIRE(fm2.size() == 1);
  CHECK(fm2[0].coords[0] == doctest::Approx(1.0));
  CHECK(fm2[0].coords[1] == doctest::Approx(0.0));
}

TEST_CASE("support functionals norm the point (property)") {
  const NormSpec specs[] = {NormSpec::lp(1.0, 3), NormSpec::lp(1.5, 3),
                            NormSpec::lp(2.0, 3), NormSpec::lp(4.0, 3),
                            NormSpec::max_norm(3),
                            NormSpec::weighted_lp(2.5, {0.5, 2.0, 1.25})};
  for (const NormSpec& spec : specs) {
    RngStream g(31, "test.support." + norm_label(spec));
    for (int k = 0; k < 50; ++k) {
      Vec x(3);
      for (int d = 0; d < 3; ++d) x[d] = g.uniform(-2.0, 2.0);
      if (norm_value(spec, x) < 1e-6) continue;
      const double nx = norm_value(spec, x);
      for (const Functional& f : support_functionals(spec, x)) {
        CHECK(dual_norm_value(spec, f) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(dot(f.coords, x) == doctest::Approx(nx).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("smoothness: l1 iff no zero coordinate, linf iff unique argmax") {
  const NormSpec l1 = NormSpec::lp(1.0, 3);
  CHECK(is_smooth_at(l1, {1.0, -2.0, 3.0}).smooth);
  CHECK(!is_smooth_at(l1, {1.0, 0.0, 3.0}).smooth);
  const SmoothnessReport bad = is_smooth_at(l1, {1.0, 0.0, 3.0});
  REQUIRE(bad.witnesses.has_value());
  CHECK(linf_dist(bad.witnesses->first.coords, bad.witnesses->second.coords) > 1e-6);

  const NormSpec li = NormSpec::max_norm(2);
  CHECK(is_smooth_at(li, {2.0, 1.0}).smooth);
  CHECK(!is_smooth_at(li, {2.0, 2.0}).smooth);

  CHECK(is_smooth_at(NormSpec::lp(2.0, 2), {1.0, 0.0}).smooth);
  CHECK(is_smooth_at(NormSpec::lp(3.0, 2), {1.0, 0.0}).smooth);
}

TEST_CASE("rotundity: analytic verdicts and witnesses") {
  CHECK(is_strictly_convex(NormSpec::lp(2.0, 2)).strictly_convex);
  CHECK(is_strictly_convex(NormSpec::lp(1.5, 3)).strictly_convex);
  CHECK(is_strictly_convex(NormSpec::lp(1.0, 1)).strictly_convex);  // dim 1

  for (const NormSpec& spec :
       {NormSpec::lp(1.0, 2), NormSpec::max_norm(2),
        NormSpec::weighted_lp(1.0, {1.0, 2.0})}) {
    const RotundityReport r = is_strictly_convex(spec);
    CHECK(!r.strictly_convex);
    REQUIRE(r.witness.has_value());
    const Vec& u = r.witness->first;
    const Vec& v = r.witness->second;
    CHECK(norm_value(spec, u) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(norm_value(spec, v) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(norm_value(spec, add(u, v)) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(linf_dist(u, v) > 1e-6);  // genuinely distinct directions
    CHECK(!r.contradiction);
  }

  CHECK(dual_is_strictly_convex(NormSpec::lp(3.0, 2)));
  CHECK(!dual_is_strictly_convex(NormSpec::lp(1.0, 2)));   // dual is sup
  CHECK(!dual_is_strictly_convex(NormSpec::max_norm(2)));  // dual is l1
}

TEST_CASE("norm directional derivatives from the support face") {
  // p = 3 at (1,1) along e0: derivative = f_0 = 2^(-2/3)
  const NormDerivative d3 =
      norm_gateaux_derivative(NormSpec::lp(3.0, 2), {1.0, 1.0}, {1.0, 0.0});
  CHECK(d3.exists);
  CHECK(d3.value == doctest::Approx(0.6299605249474366).epsilon(1e-12));
  CHECK(d3.cross_check_ok);

  // l2 at (3,4) along e0: 3/5
  const NormDerivative d2 =
      norm_gateaux_derivative(NormSpec::lp(2.0, 2), {3.0, 4.0}, {1.0, 0.0});
  CHECK(d2.exists);
  CHECK(d2.value == doctest::Approx(0.6).epsilon(1e-12));

  // l1 kink at (1,0) along e1: right +1, left -1
  const NormDerivative d1 =
      norm_gateaux_derivative(NormSpec::lp(1.0, 2), {1.0, 0.0}, {0.0, 1.0});
  CHECK(!d1.exists);
  CHECK(d1.right == doctest::Approx(1.0));
  CHECK(d1.left == doctest::Approx(-1.0));

  // smooth direction of the same l1 point: along e0 the derivative is 1
  const NormDerivative d1s =
      norm_gateaux_derivative(NormSpec::lp(1.0, 2), {1.0, 0.0}, {1.0, 0.0});
  CHECK(d1s.exists);
  CHECK(d1s.value == doctest::Approx(1.0));
}

TEST_CASE("norm labels") {
  CHECK(norm_label(NormSpec::lp(2.0, 2)) == "Lp(2)");
  CHECK(norm_label(NormSpec::max_norm(2)) == "MaxNorm(2)");
  CHECK(norm_label(NormSpec::weighted_lp(1.5, {2.0, 3.0})) ==
        "WeightedLp(1.5, [2, 3])");
}
