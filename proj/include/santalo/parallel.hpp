#pragma once

#include <cstddef>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace santalo {

// Number of workers parallel loops will use.
int worker_count();

// Caps the worker count (n >= 1). No-op when built without OpenMP.
void set_worker_count(int n);

// Sum with a fixed pairwise topology that depends only on n, never on the
// worker count, so reductions over pre-filled buffers are bit-stable.
double pairwise_sum(const double* x, std::size_t n);

// Parallel loop over [0, n). body(i) must only write state disjoint per i
// and must not throw; reductions go through buffers + pairwise_sum instead.
template <class F>
void parallel_for(std::int64_t n, F&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) body(i);
#else
  for (std::int64_t i = 0; i < n; ++i) body(i);
#endif
}

}  // namespace santalo
