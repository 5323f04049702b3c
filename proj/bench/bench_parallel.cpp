// Compares the OpenMP kernels against the serial reference implementations
// used by the tests. Not a test: prints a timing table and the worst
// divergence between the two answers.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "santalo/parallel.hpp"
#include "santalo/potential.hpp"
#include "santalo/quadrature.hpp"
#include "santalo/simulate.hpp"

using namespace santalo;

namespace {

double best_of(const std::function<void()>& f, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s < best) best = s;
  }
  return best;
}

void report(const char* name, double serial_s, double parallel_s, double divergence) {
  std::printf("%-28s %10.4fs %10.4fs %7.2fx   max|diff| %.3g\n", name, serial_s, parallel_s,
              serial_s / parallel_s, divergence);
}

}  // namespace

int main(int argc, char** argv) {
  int reps = (argc > 1 && std::string(argv[1]) == "--quick") ? 1 : 3;
  std::printf("workers: %d\n", worker_count());
  std::printf("%-28s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

  {
    Potential phi = Potential::radial_power(2, 4.0, 0.25);
    QuadratureRule rule = QuadratureRule::gauss_hermite(384);
    double a = 0, b = 0;
    double ts = best_of([&] { a = ref::integrate_exp(phi, rule); }, reps);
    double tp = best_of([&] { b = integrate_exp(phi, rule); }, reps);
    report("gauss-hermite 384x384", ts, tp, std::abs(a - b));
  }

  {
    Potential phi = Potential::radial_power(1, 4.0, 0.25);
    double a = 0, b = 0;
    double ts = best_of([&] { a = ref::mc_integrate_exp(phi, 2'000'000, 42).value; }, reps);
    double tp = best_of([&] { b = mc_integrate_exp(phi, 2'000'000, 42).value; }, reps);
    report("monte-carlo 2e6", ts, tp, std::abs(a - b));
  }

  {
    Potential phi = Potential::isotropic_quadratic(1, 1.0);
    DriftPolicy drift = follmer_drift(phi);
    SimSpec spec;
    spec.paths = 100'000;
    spec.steps = 250;
    spec.seed = 7;
    PathBundle pa, pb;
    double ts = best_of([&] { pa = ref::simulate(drift, spec); }, reps);
    double tp = best_of([&] { pb = simulate(drift, spec); }, reps);
    double worst = 0;
    for (std::int64_t p = 0; p < spec.paths; ++p) {
      worst = std::max(worst, std::abs(pa.terminal[p] - pb.terminal[p]));
      worst = std::max(worst, std::abs(pa.cost[p] - pb.cost[p]));
    }
    report("euler 1e5 paths x 250", ts, tp, worst);
  }

  return 0;
}
