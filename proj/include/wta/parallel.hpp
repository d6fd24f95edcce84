#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wta {

// Batch kernels (record generation, rollout groups, evaluation episodes,
// bootstrap resamples) are embarrassingly parallel: every index writes only
// its own slot and reductions happen serially afterwards, so both modes
// produce byte-identical results.
enum class Exec { serial, openmp };

template <typename Fn>
void parallel_for(std::size_t n, Exec exec, Fn&& fn) {
#ifdef _OPENMP
  if (exec == Exec::openmp) {
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) {
      fn(static_cast<std::size_t>(i));
    }
    return;
  }
#else
  (void)exec;
#endif
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

inline int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace wta
