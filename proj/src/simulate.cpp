#include "santalo/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "santalo/parallel.hpp"
#include "santalo/rng.hpp"

namespace santalo {
namespace {

constexpr std::int64_t kChunk = 1024;  // fixed: reduction layout must not depend on workers

struct AffineTable {
  std::vector<SymMat> g;
  std::vector<Vec> b;
};

AffineTable build_affine_table(const DriftPolicy& drift, int steps, double dt) {
  AffineTable t;
  t.g.resize(static_cast<std::size_t>(steps));
  t.b.resize(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k)
    drift.affine_at(dt * k, &t.g[static_cast<std::size_t>(k)], &t.b[static_cast<std::size_t>(k)]);
  return t;
}

std::vector<int> probe_slot_of_step(const std::vector<int>& probes, int steps) {
  std::vector<int> slot(static_cast<std::size_t>(steps), -1);
  for (std::size_t s = 0; s < probes.size(); ++s) slot[static_cast<std::size_t>(probes[s])] = static_cast<int>(s);
  return slot;
}

}  // namespace

void SimSpec::validate(int dim) const {
  if (paths < 1) throw ConfigError("simulate: need at least one path");
  if (steps < 1) throw ConfigError("simulate: need at least one step");
  if (dim < 1 || dim > kMaxDim) throw DimensionError("simulate: dimension out of range");
  for (int k : probe_steps)
    if (k < 0 || k >= steps) throw ConfigError("simulate: probe step out of range");
  if (store_paths &&
      paths * (static_cast<std::int64_t>(steps) + 1) * dim > 300'000'000)
    throw ConfigError("simulate: store_paths run too large; use summaries");
}

PathBundle simulate(const DriftPolicy& drift, const SimSpec& spec) {
  const int dim = drift.dim();
  spec.validate(dim);
  const int steps = spec.steps;
  const std::int64_t paths = spec.paths;
  const double dt = 1.0 / steps;
  const double sqrt_dt = std::sqrt(dt);
  const bool affine = drift.is_affine();
  const AffineTable table = affine ? build_affine_table(drift, steps, dt) : AffineTable{};
  const std::vector<int> slot = probe_slot_of_step(spec.probe_steps, steps);
  const int nprobe = static_cast<int>(spec.probe_steps.size());

  PathBundle b;
  b.dim = dim;
  b.steps = steps;
  b.paths = paths;
  b.dt = dt;
  b.seed = spec.seed;
  b.drift_label = drift.label();
  b.probe_steps = spec.probe_steps;
  b.terminal.assign(static_cast<std::size_t>(paths) * dim, 0.0);
  b.cost.assign(static_cast<std::size_t>(paths), 0.0);
  b.drift_sum.assign(static_cast<std::size_t>(steps) * dim, 0.0);
  b.drift_sq_sum.assign(static_cast<std::size_t>(steps) * dim, 0.0);
  b.probe_drift.assign(static_cast<std::size_t>(paths) * nprobe * dim, 0.0);
  if (spec.store_paths) {
    b.states.assign(static_cast<std::size_t>(paths) * (steps + 1) * dim, 0.0);
    b.increments.assign(static_cast<std::size_t>(paths) * steps * dim, 0.0);
  }
  int clamp_steps = 0;
  for (int k = 0; k < steps; ++k)
    if (drift.clamps_at(dt * k)) ++clamp_steps;
  b.clamped_evals = static_cast<std::int64_t>(clamp_steps) * paths;

  const std::int64_t nchunks = (paths + kChunk - 1) / kChunk;
  std::vector<double> chunk_sum(static_cast<std::size_t>(nchunks) * steps * dim, 0.0);
  std::vector<double> chunk_sq(static_cast<std::size_t>(nchunks) * steps * dim, 0.0);
  std::atomic<std::int64_t> first_bad{-1};

  parallel_for(nchunks, [&](std::int64_t ci) {
    double* lsum = &chunk_sum[static_cast<std::size_t>(ci) * steps * dim];
    double* lsq = &chunk_sq[static_cast<std::size_t>(ci) * steps * dim];
    const std::int64_t p_lo = ci * kChunk;
    const std::int64_t p_hi = std::min(paths, p_lo + kChunk);
    for (std::int64_t p = p_lo; p < p_hi; ++p) {
      NormalStream st(spec.seed, StreamPurpose::kPathIncrements, static_cast<std::uint64_t>(p));
      Vec x(dim);
      double cost = 0.0;
      if (spec.store_paths)
        for (int d = 0; d < dim; ++d)
          b.states[(static_cast<std::size_t>(p) * (steps + 1)) * dim + d] = 0.0;
      for (int k = 0; k < steps; ++k) {
        Vec u(dim);
        bool ok = true;
        if (affine) {
          u = table.g[static_cast<std::size_t>(k)].apply(x) + table.b[static_cast<std::size_t>(k)];
        } else {
          // Exceptions must not cross the parallel region.
          try {
            u = drift.value(dt * k, x);
          } catch (...) {
            ok = false;
          }
        }
        if (!ok || !u.all_finite()) {
          std::int64_t expect = -1;
          first_bad.compare_exchange_strong(expect, p * steps + k);
          return;
        }
        cost += 0.5 * u.norm2() * dt;
        if (slot[static_cast<std::size_t>(k)] >= 0)
          for (int d = 0; d < dim; ++d)
            b.probe_drift[(static_cast<std::size_t>(p) * nprobe +
                           slot[static_cast<std::size_t>(k)]) *
                              dim +
                          d] = u[d];
        for (int d = 0; d < dim; ++d) {
          double db = sqrt_dt * st.normal(static_cast<std::uint64_t>(k) * dim + d);
          if (spec.store_paths)
            b.increments[(static_cast<std::size_t>(p) * steps + k) * dim + d] = db;
          x[d] = x[d] + u[d] * dt + db;
          lsum[static_cast<std::size_t>(k) * dim + d] += u[d];
          lsq[static_cast<std::size_t>(k) * dim + d] += u[d] * u[d];
        }
        if (spec.store_paths)
          for (int d = 0; d < dim; ++d)
            b.states[(static_cast<std::size_t>(p) * (steps + 1) + k + 1) * dim + d] = x[d];
      }
      for (int d = 0; d < dim; ++d) b.terminal[static_cast<std::size_t>(p) * dim + d] = x[d];
      b.cost[static_cast<std::size_t>(p)] = cost;
    }
  });

  if (std::int64_t bad = first_bad.load(); bad >= 0)
    throw SimulationError("simulate: non-finite drift at path " + std::to_string(bad / steps) +
                          ", step " + std::to_string(bad % steps) + " (" + drift.label() + ")");

  // Serial chunk combine in fixed order keeps the sums worker-independent.
  for (std::int64_t ci = 0; ci < nchunks; ++ci) {
    const double* lsum = &chunk_sum[static_cast<std::size_t>(ci) * steps * dim];
    const double* lsq = &chunk_sq[static_cast<std::size_t>(ci) * steps * dim];
    for (std::size_t i = 0; i < static_cast<std::size_t>(steps) * dim; ++i) {
      b.drift_sum[i] += lsum[i];
      b.drift_sq_sum[i] += lsq[i];
    }
  }
  return b;
}

Vec PathBundle::terminal_at(std::int64_t p) const {
  Vec x(dim);
  for (int d = 0; d < dim; ++d) x[d] = terminal[static_cast<std::size_t>(p) * dim + d];
  return x;
}

Vec PathBundle::state_at(std::int64_t p, int k) const {
  if (states.empty()) throw Error("PathBundle: states were not stored");
  Vec x(dim);
  for (int d = 0; d < dim; ++d)
    x[d] = states[(static_cast<std::size_t>(p) * (steps + 1) + k) * dim + d];
  return x;
}

Vec PathBundle::increment_at(std::int64_t p, int k) const {
  if (increments.empty()) throw Error("PathBundle: increments were not stored");
  Vec x(dim);
  for (int d = 0; d < dim; ++d)
    x[d] = increments[(static_cast<std::size_t>(p) * steps + k) * dim + d];
  return x;
}

Vec PathBundle::probe_at(std::int64_t p, int probe_slot) const {
  Vec x(dim);
  int nprobe = static_cast<int>(probe_steps.size());
  for (int d = 0; d < dim; ++d)
    x[d] = probe_drift[(static_cast<std::size_t>(p) * nprobe + probe_slot) * dim + d];
  return x;
}

ValueEstimate borell_value(const Potential& phi, const PathBundle& bundle) {
  if (phi.dim() != bundle.dim) throw DimensionError("borell_value: dimension mismatch");
  const std::int64_t n = bundle.paths;
  std::vector<double> payoff(static_cast<std::size_t>(n));
  std::atomic<bool> bad{false};
  parallel_for(n, [&](std::int64_t p) {
    double v = phi.value(bundle.terminal_at(p)) - bundle.cost[static_cast<std::size_t>(p)];
    if (!std::isfinite(v)) bad.store(true);
    payoff[static_cast<std::size_t>(p)] = v;
  });
  if (bad.load())
    throw SimulationError("borell_value: payoff is not finite (phi unbounded on terminals?)");
  double mean = pairwise_sum(payoff.data(), payoff.size()) / static_cast<double>(n);
  for (double& v : payoff) {
    double d = v - mean;
    v = d * d;
  }
  double ssq = pairwise_sum(payoff.data(), payoff.size());
  ValueEstimate e;
  e.value = mean;
  e.paths = n;
  e.std_error = n > 1 ? std::sqrt(ssq / static_cast<double>(n - 1)) /
                            std::sqrt(static_cast<double>(n))
                      : 0.0;
  return e;
}

DriftProfile drift_mean_profile(const PathBundle& bundle) {
  DriftProfile pr;
  pr.dim = bundle.dim;
  pr.dt = bundle.dt;
  const double n = static_cast<double>(bundle.paths);
  const std::size_t total = bundle.drift_sum.size();
  pr.mean.resize(total);
  pr.se.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    double mean = bundle.drift_sum[i] / n;
    double var = (bundle.drift_sq_sum[i] - bundle.drift_sum[i] * bundle.drift_sum[i] / n) /
                 std::max(n - 1.0, 1.0);
    pr.mean[i] = mean;
    pr.se[i] = std::sqrt(std::max(var, 0.0) / n);
  }
  return pr;
}

double DriftProfile::max_z(const Vec& b, const std::vector<int>& steps_to_check) const {
  double worst = 0.0;
  for (int k : steps_to_check) {
    for (int d = 0; d < dim; ++d) {
      std::size_t i = static_cast<std::size_t>(k) * dim + d;
      double diff = std::abs(mean[i] - b[d]);
      if (se[i] > 0.0) {
        worst = std::max(worst, diff / se[i]);
      } else if (diff > 1e-12) {
        return std::numeric_limits<double>::infinity();
      }
    }
  }
  return worst;
}

namespace ref {

PathBundle simulate(const DriftPolicy& drift, const SimSpec& spec) {
  const int dim = drift.dim();
  spec.validate(dim);
  const int steps = spec.steps;
  const std::int64_t paths = spec.paths;
  const double dt = 1.0 / steps;
  const double sqrt_dt = std::sqrt(dt);
  // Same evaluation route as the parallel kernel (precomputed affine table),
  // so per-path results match bitwise; only the accumulation order differs.
  const bool affine = drift.is_affine();
  const AffineTable table = affine ? build_affine_table(drift, steps, dt) : AffineTable{};
  const std::vector<int> slot = probe_slot_of_step(spec.probe_steps, steps);
  const int nprobe = static_cast<int>(spec.probe_steps.size());

  PathBundle b;
  b.dim = dim;
  b.steps = steps;
  b.paths = paths;
  b.dt = dt;
  b.seed = spec.seed;
  b.drift_label = drift.label();
  b.probe_steps = spec.probe_steps;
  b.terminal.assign(static_cast<std::size_t>(paths) * dim, 0.0);
  b.cost.assign(static_cast<std::size_t>(paths), 0.0);
  b.drift_sum.assign(static_cast<std::size_t>(steps) * dim, 0.0);
  b.drift_sq_sum.assign(static_cast<std::size_t>(steps) * dim, 0.0);
  b.probe_drift.assign(static_cast<std::size_t>(paths) * nprobe * dim, 0.0);
  if (spec.store_paths) {
    b.states.assign(static_cast<std::size_t>(paths) * (steps + 1) * dim, 0.0);
    b.increments.assign(static_cast<std::size_t>(paths) * steps * dim, 0.0);
  }
  for (std::int64_t p = 0; p < paths; ++p) {
    NormalStream st(spec.seed, StreamPurpose::kPathIncrements, static_cast<std::uint64_t>(p));
    Vec x(dim);
    double cost = 0.0;
    for (int k = 0; k < steps; ++k) {
      double t = dt * k;
      if (drift.clamps_at(t)) ++b.clamped_evals;
      Vec u = affine ? table.g[static_cast<std::size_t>(k)].apply(x) +
                           table.b[static_cast<std::size_t>(k)]
                     : drift.value(t, x);
      if (!u.all_finite())
        throw SimulationError("simulate: non-finite drift at path " + std::to_string(p) +
                              ", step " + std::to_string(k));
      cost += 0.5 * u.norm2() * dt;
      if (slot[static_cast<std::size_t>(k)] >= 0)
        for (int d = 0; d < dim; ++d)
          b.probe_drift[(static_cast<std::size_t>(p) * nprobe + slot[static_cast<std::size_t>(k)]) *
                            dim +
                        d] = u[d];
      for (int d = 0; d < dim; ++d) {
        double db = sqrt_dt * st.normal(static_cast<std::uint64_t>(k) * dim + d);
        if (spec.store_paths)
          b.increments[(static_cast<std::size_t>(p) * steps + k) * dim + d] = db;
        x[d] = x[d] + u[d] * dt + db;
        b.drift_sum[static_cast<std::size_t>(k) * dim + d] += u[d];
        b.drift_sq_sum[static_cast<std::size_t>(k) * dim + d] += u[d] * u[d];
      }
      if (spec.store_paths)
        for (int d = 0; d < dim; ++d)
          b.states[(static_cast<std::size_t>(p) * (steps + 1) + k + 1) * dim + d] = x[d];
    }
    for (int d = 0; d < dim; ++d) b.terminal[static_cast<std::size_t>(p) * dim + d] = x[d];
    b.cost[static_cast<std::size_t>(p)] = cost;
  }
  return b;
}

}  // namespace ref
}  // namespace santalo
