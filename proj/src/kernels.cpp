#include "chebylab/kernels.hpp"

#include <cstdlib>

namespace chebylab::kernels {

int thread_count() {
#if defined(_OPENMP)
  static const int cached = [] {
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("CHEBYLAB_THREADS")) {
      int cap = std::atoi(env);
      if (cap > 0 && cap < n) n = cap;
    }
    return n > 0 ? n : 1;
  }();
  return cached;
#else
  return 1;
#endif
}

}  // namespace chebylab::kernels
