#include "santalo/parallel.hpp"

#include <algorithm>

namespace santalo {
namespace {

int g_worker_cap = 0;  // 0 = use the OpenMP default

double pairwise_sum_impl(const double* x, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum_impl(x, half) + pairwise_sum_impl(x + half, n - half);
}

}  // namespace

int worker_count() {
#ifdef _OPENMP
  return g_worker_cap > 0 ? g_worker_cap : omp_get_max_threads();
#else
  return 1;
#endif
}

void set_worker_count(int n) {
  g_worker_cap = std::max(n, 1);
#ifdef _OPENMP
  omp_set_num_threads(g_worker_cap);
#endif
}

double pairwise_sum(const double* x, std::size_t n) { return pairwise_sum_impl(x, n); }

}  // namespace santalo
