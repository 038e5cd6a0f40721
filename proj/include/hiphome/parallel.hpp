#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdint>

namespace hiphome {

// Execution policy for the data-parallel kernels.  Every parallel kernel
// keeps a serial path that performs the identical arithmetic in the same
// per-element order, so the two policies produce bitwise-equal results;
// the tests and the benchmark target compare them.
enum class Exec { Serial, Parallel };

inline int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// threads <= 0 keeps the runtime default (all available cores).
inline void set_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

// Runs fn(i) for i in [0, n).  Iterations must be independent and write to
// disjoint locations; reductions are done by the caller over per-index
// slots so that the summation order is fixed.
template <class F>
void parallel_for(std::int64_t n, Exec exec, F&& fn) {
  if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
#endif
  }
  for (std::int64_t i = 0; i < n; ++i) fn(i);
}

// Dynamic variant for unevenly sized work items (experiment sweep points).
template <class F>
void parallel_for_dynamic(std::int64_t n, Exec exec, F&& fn) {
  if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
#endif
  }
  for (std::int64_t i = 0; i < n; ++i) fn(i);
}

}  // namespace hiphome
