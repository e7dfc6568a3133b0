#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <vector>

#include "chebylab/kernels.hpp"
#include "chebylab/rng.hpp"
#include "chebylab/vec.hpp"

using namespace chebylab;

// First test case on purpose: thread_count caches its env lookup, so the cap
// must be in place before anything else touches the kernels.
TEST_CASE("CHEBYLAB_THREADS caps the worker count") {
  setenv("CHEBYLAB_THREADS", "1", 1);
  CHECK(kernels::thread_count() == 1);
}

namespace {

double value_at(std::int64_t i) {
  // Deterministic, irregular, with deliberate ties at indices 41 and 141.
  if (i == 41 || i == 141) return -7.5;
  return std::sin(0.1 * static_cast<double>(i)) +
         0.001 * static_cast<double>(i % 17);
}

}  // namespace

TEST_CASE("min/max scans match the serial reference bitwise") {
  const std::int64_t n = 5000;
  const kernels::Best min_s = kernels::min_scan(n, value_at, kernels::Exec::Serial);
  const kernels::Best min_p = kernels::min_scan(n, value_at, kernels::Exec::Parallel);
  CHECK(min_s.value == min_p.value);
  CHECK(min_s.index == min_p.index);
  CHECK(min_s.value == -7.5);
  CHECK(min_s.index == 41);  // first of the tied minima wins

  const kernels::Best max_s = kernels::max_scan(n, value_at, kernels::Exec::Serial);
  const kernels::Best max_p = kernels::max_scan(n, value_at, kernels::Exec::Parallel);
  CHECK(max_s.value == max_p.value);
  CHECK(max_s.index == max_p.index);
}

TEST_CASE("collect_below returns ascending indices identical to a serial filter") {
  const std::int64_t n = 3000;
  const double thr = -0.4;
  const auto serial = kernels::collect_below(n, value_at, thr, kernels::Exec::Serial);
  const auto parallel =
      kernels::collect_below(n, value_at, thr, kernels::Exec::Parallel);
  CHECK(serial == parallel);
  REQUIRE(!serial.empty());
  std::vector<std::int64_t> expected;
  for (std::int64_t i = 0; i < n; ++i)
    if (value_at(i) < thr) expected.push_back(i);
  CHECK(serial == expected);
}

TEST_CASE("for_each_index touches every slot exactly once") {
  const std::int64_t n = 1234;
  std::vector<int> hits(static_cast<std::size_t>(n), 0);
  kernels::for_each_index(n, [&](std::int64_t i) {
    hits[static_cast<std::size_t>(i)] += 1;
  });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("rng streams are reproducible and decorrelated") {
  RngStream a(7, "test.stream", 0);
  RngStream b(7, "test.stream", 0);
  RngStream c(7, "test.stream", 1);
  RngStream d(7, "other.stream", 0);
  bool same_ab = true, diff_ac = false, diff_ad = false;
  for (int k = 0; k < 64; ++k) {
    const double va = a.uniform01();
    const double vb = b.uniform01();
    const double vc = c.uniform01();
    const double vd = d.uniform01();
    same_ab = same_ab && va == vb;
    diff_ac = diff_ac || va != vc;
    diff_ad = diff_ad || va != vd;
    CHECK(va >= 0.0);
    CHECK(va < 1.0);
  }
  CHECK(same_ab);
  CHECK(diff_ac);
  CHECK(diff_ad);
}

TEST_CASE("rng helpers: range, gaussian moments, unit vectors") {
  RngStream g(123, "test.helpers");
  double lo = 1e9, hi = -1e9, acc = 0.0, acc2 = 0.0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const double u = g.uniform(-2.0, 3.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    const double z = g.normal();
    acc += z;
    acc2 += z * z;
  }
  CHECK(lo >= -2.0);
  CHECK(hi < 3.0);
  CHECK(std::fabs(acc / n) < 0.05);        // mean ~ 0
  CHECK(std::fabs(acc2 / n - 1.0) < 0.1);  // variance ~ 1

  for (int k = 0; k < 10; ++k) {
    const Vec u = g.unit_l2(3);
    CHECK(l2(u) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("box_point stays inside the box") {
  RngStream g(5, "test.box");
  const Vec lo{-1.0, 2.0};
  const Vec hi{1.0, 5.0};
  for (int k = 0; k < 200; ++k) {
    const Vec x = g.box_point(lo, hi);
    REQUIRE(x.size() == 2);
    for (int d = 0; d < 2; ++d) {
      CHECK(x[d] >= lo[d]);
      CHECK(x[d] < hi[d]);
    }
  }
}
