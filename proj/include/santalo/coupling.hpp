#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "santalo/drift.hpp"
#include "santalo/potential.hpp"
#include "santalo/simulate.hpp"
#include "santalo/vec.hpp"

namespace santalo {

// Two Euler chains on one Brownian path per sample:
//   forward   X_{k+1} = X_k + u(t_k, X_k) dt + dB_k
//   backward  Y_{j+1} = Y_j + v(t_j, Y_j) dt + dB^_j,   dB^_j = dB_{M-1-j}
// (the discrete increments of the time-reversed Brownian motion, shared
// exactly). Forward step k and backward step j = M-1-k consume the same
// increment; u_k depends on dB_{0..k-1} and v^_j on dB_{M-j..M-1}, so the
// paired drifts stay independent.
struct CoupledSpec {
  std::int64_t paths = 0;
  int steps = 0;
  std::uint64_t seed = 0;
  std::vector<int> probe_steps;  // slots for per-path drift probes, both chains
  bool store_paths = false;      // keep increments for replay tests (small runs)

  void validate(int dim) const;
};

struct CoupledBundle {
  int dim = 0;
  int steps = 0;
  std::int64_t paths = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::string u_label, v_label;

  std::vector<double> x_terminal, y_terminal;  // paths*dim
  std::vector<double> x_cost, y_cost;          // paths: 0.5 int |drift|^2 dt
  std::vector<double> u_int, v_int;            // paths*dim: int drift dt
  // paths: int |u_t - v^_{paired}|^2 dt with the k <-> M-1-k pairing
  std::vector<double> cross_l2;
  std::vector<int> probe_steps;
  std::vector<double> probe_u, probe_v;        // paths*probes*dim
  std::vector<double> increments;              // paths*steps*dim, when stored
  std::int64_t clamped_evals = 0;

  [[nodiscard]] Vec x_terminal_at(std::int64_t p) const;
  [[nodiscard]] Vec y_terminal_at(std::int64_t p) const;
  [[nodiscard]] Vec u_int_at(std::int64_t p) const;
  [[nodiscard]] Vec v_int_at(std::int64_t p) const;
  [[nodiscard]] Vec probe_u_at(std::int64_t p, int slot) const;
  [[nodiscard]] Vec probe_v_at(std::int64_t p, int slot) const;
};

CoupledBundle coupled_simulate(const DriftPolicy& u, const DriftPolicy& v,
                               const CoupledSpec& spec);

// Convenience: forward drift for phi, backward drift for its c-partner,
// refusing the c = 1/2 regime when phi is not centered.
struct CoupledRun {
  Potential psi;
  CoupledBundle bundle;
};
CoupledRun coupled_run(const Potential& phi, double c, const CoupledSpec& spec);

// Statistics of <u_probe, v_probe> over paths. For a probe pair (k, j) with
// k + j <= steps the two drifts are independent, so the covariance vanishes;
// with both chains centered the raw inner product vanishes too.
struct OrthogonalityStat {
  int forward_step = 0;
  int backward_step = 0;
  double mean_inner = 0.0;   // E <u, v^>
  double se_inner = 0.0;
  double covariance = 0.0;   // E<u,v^> - <Eu, Ev^>
  double se_covariance = 0.0;
  Vec mean_u, mean_v;
};
OrthogonalityStat orthogonality_stat(const CoupledBundle& bundle, int slot_u, int slot_v);

// Pathwise and aggregate verdicts for the two-chain argument:
//   S = E[phi(X_1) + psi(Y_1) - cost_u - cost_v]   (sum of the two
//       variational values; equals the log product at optimal drifts)
//   T = E[c|X_1 - Y_1|^2 - cost_u - cost_v]
//   R = E[c int|u - v^|^2 dt - cost_u - cost_v]
// S <= T pathwise via the partner inequality, T <= R pathwise via
// Cauchy-Schwarz, and R concentrates at -<bary_phi, bary_psi> (= 0 when
// centered, c = 1/2).
struct ChainReport {
  double c = 0.0;
  ValueEstimate s, t, r;
  std::int64_t pointwise_violations = 0;  // phi(X)+psi(Y) > c|X-Y|^2 + slack
  std::int64_t cs_violations = 0;         // |X-Y|^2 > int|u-v^|^2 + slack
  std::int64_t identity_violations = 0;   // X-Y != int u - int v^ (fp slack)
  double worst_pointwise_gap = 0.0;
  double worst_cs_gap = 0.0;
  double worst_identity_err = 0.0;
  std::vector<std::int64_t> offenders;    // first few violating paths
  double slack = 0.0;
};
ChainReport chain_report(const Potential& phi, const Potential& psi, double c,
                         const CoupledBundle& bundle, double slack = 1e-9);

}  // namespace santalo
