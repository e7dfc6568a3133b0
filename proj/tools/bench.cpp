// Serial-vs-parallel benchmark for the scan kernels on representative
// distance workloads.  Each workload runs twice (Exec::Serial, then
// Exec::Parallel) and the results must match bitwise; a mismatch exits
// nonzero since it would mean the parallel reductions are not faithful to
// the serial reference.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "chebylab/kernels.hpp"
#include "chebylab/rng.hpp"
#include "chebylab/sets.hpp"
#include "chebylab/strfmt.hpp"

namespace {

using chebylab::Vec;
namespace kernels = chebylab::kernels;

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct RunResult {
  double value = 0.0;
  std::int64_t index = -1;
  double ms = 0.0;
};

template <class Fn>
RunResult timed(Fn&& fn) {
  RunResult r;
  const double t0 = now_ms();
  const kernels::Best b = fn();
  r.ms = now_ms() - t0;
  r.value = b.value;
  r.index = b.index;
  return r;
}

void report(const std::string& name, std::int64_t n, const RunResult& serial,
            const RunResult& parallel, bool match) {
  std::cout << name << ": n=" << n
            << " serial=" << chebylab::format_double(serial.ms) << "ms"
            << " parallel=" << chebylab::format_double(parallel.ms) << "ms"
            << " speedup=" << chebylab::format_double(serial.ms / parallel.ms)
            << " match=" << (match ? "yes" : "NO") << "\n";
}

// Decodes a flat index into a point of the k x k lattice over [-3, 3]^2.
Vec lattice_point(std::int64_t i, std::int64_t k) {
  const std::int64_t ix = i % k;
  const std::int64_t iy = i / k;
  return Vec{-3.0 + 6.0 * static_cast<double>(ix) / static_cast<double>(k - 1),
             -3.0 + 6.0 * static_cast<double>(iy) / static_cast<double>(k - 1)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel kernel benchmark"};
  double scale = 1.0;
  app.add_option("--scale", scale, "workload size multiplier")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  std::cout << "threads=" << kernels::thread_count()
            << " (cap via CHEBYLAB_THREADS)\n";
  bool all_match = true;

  {
    // Farthest lattice point from a half-space under L3: one cheap analytic
    // solve per index, max-reduction.
    const auto k = static_cast<std::int64_t>(std::sqrt(20000.0 * scale));
    const std::int64_t n = k * k;
    const chebylab::SetSpec set =
        chebylab::HalfSpace{chebylab::Functional{{1.0, 2.0}}, 1.0};
    const chebylab::NormSpec space = chebylab::NormSpec::lp(3.0, 2);
    const auto value_at = [&](std::int64_t i) {
      return chebylab::distance(set, lattice_point(i, k), space).distance;
    };
    const RunResult s =
        timed([&] { return kernels::max_scan(n, value_at, kernels::Exec::Serial); });
    const RunResult p =
        timed([&] { return kernels::max_scan(n, value_at, kernels::Exec::Parallel); });
    const bool match = s.value == p.value && s.index == p.index;
    all_match = all_match && match;
    report("halfspace-max-scan", n, s, p, match);
  }

  {
    // Nearest lattice point to a triangle under L2: polyline bisection per
    // index, min-reduction.  Heavier per-item cost.
    const auto k = static_cast<std::int64_t>(std::sqrt(2000.0 * scale));
    const std::int64_t n = k * k;
    const chebylab::SetSpec set =
        chebylab::ConvexPolytope{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
    const chebylab::NormSpec space = chebylab::NormSpec::lp(2.0, 2);
    const auto value_at = [&](std::int64_t i) {
      return chebylab::distance(set, lattice_point(i, k), space).distance;
    };
    const RunResult s =
        timed([&] { return kernels::min_scan(n, value_at, kernels::Exec::Serial); });
    const RunResult p =
        timed([&] { return kernels::min_scan(n, value_at, kernels::Exec::Parallel); });
    const bool match = s.value == p.value && s.index == p.index;
    all_match = all_match && match;
    report("triangle-min-scan", n, s, p, match);
  }

  {
    // Shell-slope sweep at a fixed exterior point of a ball: one distance
    // quotient per seeded direction, filled through for_each_index and
    // max-reduced serially (the shape of the condition (v) inner loop).
    const auto n = static_cast<std::int64_t>(5000.0 * scale);
    const chebylab::SetSpec set = chebylab::Ball{{0.0, 0.0}, 1.0};
    const chebylab::NormSpec space = chebylab::NormSpec::lp(2.0, 2);
    const Vec x{2.0, 1.0};
    const double d0 = chebylab::distance(set, x, space).distance;
    const double t = 1e-5;
    std::vector<double> quotients(static_cast<std::size_t>(n));
    const auto fill = [&](kernels::Exec exec) {
      kernels::for_each_index(
          n,
          [&](std::int64_t i) {
            chebylab::RngStream g(42, "bench.shell", static_cast<std::uint64_t>(i));
            const Vec u = g.unit_l2(2);
            const Vec y = chebylab::axpy(x, t, u);
            quotients[static_cast<std::size_t>(i)] =
                (chebylab::distance(set, y, space).distance - d0) / t;
          },
          exec);
      kernels::Best best;
      for (std::int64_t i = 0; i < n; ++i) {
        const double v = quotients[static_cast<std::size_t>(i)];
        if (best.index < 0 || v > best.value) {
          best.value = v;
          best.index = i;
        }
      }
      return best;
    };
    const RunResult s = timed([&] { return fill(kernels::Exec::Serial); });
    const RunResult p = timed([&] { return fill(kernels::Exec::Parallel); });
    const bool match = s.value == p.value && s.index == p.index;
    all_match = all_match && match;
    report("shell-slope-sweep", n, s, p, match);
  }

  if (!all_match) {
    std::cerr << "error: serial and parallel results differ\n";
    return 1;
  }
  return 0;
}
