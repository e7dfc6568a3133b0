#pragma once

// Data-parallel kernels used by the scan-heavy parts of the project
// (brute-force distance scans, per-grid-point condition evaluation,
// Lipschitz pair sweeps).  Each kernel has a serial reference
// implementation and an OpenMP one; results are required to be bitwise
// identical, which the test suite checks.  Ties in min/max scans resolve
// to the smallest index in both variants.
//
// CHEBYLAB_THREADS caps the OpenMP thread count (0/unset = library default).

#include <cstdint>
#include <vector>

#include "chebylab/vec.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace chebylab::kernels {

enum class Exec { Serial, Parallel };

// Threads to use for parallel kernels, honouring CHEBYLAB_THREADS.
int thread_count();

struct Best {
  double value = 0.0;
  std::int64_t index = -1;  // -1 when n == 0
};

template <class F>
Best min_scan_serial(std::int64_t n, F&& value_at) {
  Best b;
  for (std::int64_t i = 0; i < n; ++i) {
    double v = value_at(i);
    if (b.index < 0 || v < b.value) {
      b.value = v;
      b.index = i;
    }
  }
  return b;
}

template <class F>
Best max_scan_serial(std::int64_t n, F&& value_at) {
  Best b;
  for (std::int64_t i = 0; i < n; ++i) {
    double v = value_at(i);
    if (b.index < 0 || v > b.value) {
      b.value = v;
      b.index = i;
    }
  }
  return b;
}

template <class F>
void for_each_index_serial(std::int64_t n, F&& body) {
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

#if defined(_OPENMP)

template <class F>
Best min_scan_parallel(std::int64_t n, F&& value_at) {
  int nt = thread_count();
  std::vector<Best> part(static_cast<std::size_t>(nt));
#pragma omp parallel num_threads(nt)
  {
    int tid = omp_get_thread_num();
    Best local;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      double v = value_at(i);
      if (local.index < 0 || v < local.value) {
        local.value = v;
        local.index = i;
      }
    }
    part[static_cast<std::size_t>(tid)] = local;
  }
  Best b;
  for (const Best& p : part) {
    if (p.index < 0) continue;
    // Strict comparison plus index tiebreak reproduces the serial scan
    // exactly: the serial winner is the lowest index attaining the min.
    if (b.index < 0 || p.value < b.value ||
        (p.value == b.value && p.index < b.index)) {
      b = p;
    }
  }
  return b;
}

template <class F>
Best max_scan_parallel(std::int64_t n, F&& value_at) {
  int nt = thread_count();
  std::vector<Best> part(static_cast<std::size_t>(nt));
#pragma omp parallel num_threads(nt)
  {
    int tid = omp_get_thread_num();
    Best local;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      double v = value_at(i);
      if (local.index < 0 || v > local.value) {
        local.value = v;
        local.index = i;
      }
    }
    part[static_cast<std::size_t>(tid)] = local;
  }
  Best b;
  for (const Best& p : part) {
    if (p.index < 0) continue;
    if (b.index < 0 || p.value > b.value ||
        (p.value == b.value && p.index < b.index)) {
      b = p;
    }
  }
  return b;
}

template <class F>
void for_each_index_parallel(std::int64_t n, F&& body) {
  int nt = thread_count();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

#else

template <class F>
Best min_scan_parallel(std::int64_t n, F&& value_at) {
  return min_scan_serial(n, value_at);
}
template <class F>
Best max_scan_parallel(std::int64_t n, F&& value_at) {
  return max_scan_serial(n, value_at);
}
template <class F>
void for_each_index_parallel(std::int64_t n, F&& body) {
  for_each_index_serial(n, body);
}

#endif  // _OPENMP

template <class F>
Best min_scan(std::int64_t n, F&& value_at, Exec exec = Exec::Parallel) {
  return exec == Exec::Serial ? min_scan_serial(n, value_at)
                              : min_scan_parallel(n, value_at);
}

template <class F>
Best max_scan(std::int64_t n, F&& value_at, Exec exec = Exec::Parallel) {
  return exec == Exec::Serial ? max_scan_serial(n, value_at)
                              : max_scan_parallel(n, value_at);
}

template <class F>
void for_each_index(std::int64_t n, F&& body, Exec exec = Exec::Parallel) {
  if (exec == Exec::Serial)
    for_each_index_serial(n, body);
  else
    for_each_index_parallel(n, body);
}

// Indices i with value_at(i) <= threshold, ascending.  The parallel variant
// fills a flag array and compacts serially, so the output order is fixed.
template <class F>
std::vector<std::int64_t> collect_below(std::int64_t n, F&& value_at,
                                        double threshold,
                                        Exec exec = Exec::Parallel) {
  std::vector<char> keep(static_cast<std::size_t>(n), 0);
  for_each_index(
      n, [&](std::int64_t i) { keep[static_cast<std::size_t>(i)] = value_at(i) <= threshold; },
      exec);
  std::vector<std::int64_t> out;
  for (std::int64_t i = 0; i < n; ++i)
    if (keep[static_cast<std::size_t>(i)]) out.push_back(i);
  return out;
}

}  // namespace chebylab::kernels
