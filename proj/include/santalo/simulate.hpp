#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "santalo/drift.hpp"
#include "santalo/potential.hpp"
#include "santalo/vec.hpp"

namespace santalo {

struct SimSpec {
  std::int64_t paths = 0;
  int steps = 0;
  std::uint64_t seed = 0;
  // Keep whole trajectories and increments (memory: paths*steps*dim doubles
  // each); for small diagnostic runs only. Summaries are always kept.
  bool store_paths = false;
  // Steps at which per-path drift values are recorded.
  std::vector<int> probe_steps;

  void validate(int dim) const;
};

// Results of an Euler run of dX = u(t,X) dt + dB, X_0 = 0, on [0,1].
// Path p draws its increments from stream (seed, kPathIncrements, p), so the
// ensemble is identical for any worker count.
struct PathBundle {
  int dim = 0;
  int steps = 0;
  std::int64_t paths = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::string drift_label;

  std::vector<double> terminal;       // paths*dim
  std::vector<double> cost;           // paths: 0.5 sum |u_k|^2 dt (left endpoint)
  std::vector<double> drift_sum;      // steps*dim: sum over paths of u_k
  std::vector<double> drift_sq_sum;   // steps*dim: sum of u_k^2 per coordinate
  std::vector<int> probe_steps;
  std::vector<double> probe_drift;    // paths*probes*dim
  std::int64_t clamped_evals = 0;

  std::vector<double> states;         // paths*(steps+1)*dim, when stored
  std::vector<double> increments;     // paths*steps*dim, when stored

  [[nodiscard]] Vec terminal_at(std::int64_t p) const;
  [[nodiscard]] Vec state_at(std::int64_t p, int k) const;      // stored runs
  [[nodiscard]] Vec increment_at(std::int64_t p, int k) const;  // stored runs
  [[nodiscard]] Vec probe_at(std::int64_t p, int probe_slot) const;
};

PathBundle simulate(const DriftPolicy& drift, const SimSpec& spec);

struct ValueEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t paths = 0;
};

// Monte Carlo estimate of E[phi(X_1) - 0.5 int |u|^2 dt]: the quantity whose
// supremum over drifts is log E e^{phi(B_1)}.
ValueEstimate borell_value(const Potential& phi, const PathBundle& bundle);

// Per-step mean drift with standard errors; the optimal drift's mean is
// constant in time (equal to the barycenter of e^phi dgamma).
struct DriftProfile {
  int dim = 0;
  double dt = 0.0;
  std::vector<double> mean;  // steps*dim
  std::vector<double> se;    // steps*dim

  // |mean_k - b| / se over the given steps; deterministic coordinates
  // (se = 0) must match b to 1e-12.
  [[nodiscard]] double max_z(const Vec& b, const std::vector<int>& steps_to_check) const;
};

DriftProfile drift_mean_profile(const PathBundle& bundle);

namespace ref {
// Serial reference: same streams, natural-order accumulation.
PathBundle simulate(const DriftPolicy& drift, const SimSpec& spec);
}  // namespace ref

}  // namespace santalo
