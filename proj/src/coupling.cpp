#include "santalo/coupling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "santalo/parallel.hpp"
#include "santalo/quadrature.hpp"
#include "santalo/rng.hpp"
#include "santalo/transforms.hpp"

namespace santalo {
namespace {

constexpr std::int64_t kChunk = 1024;

struct AffineTable {
  bool active = false;
  std::vector<SymMat> g;
  std::vector<Vec> b;
};

AffineTable build_table(const DriftPolicy& d, int steps, double dt) {
  AffineTable t;
  if (!d.is_affine()) return t;
  t.active = true;
  t.g.resize(static_cast<std::size_t>(steps));
  t.b.resize(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k)
    d.affine_at(dt * k, &t.g[static_cast<std::size_t>(k)], &t.b[static_cast<std::size_t>(k)]);
  return t;
}

ValueEstimate estimate_of(std::vector<double>* buf) {
  const std::int64_t n = static_cast<std::int64_t>(buf->size());
  double mean = pairwise_sum(buf->data(), buf->size()) / static_cast<double>(n);
  for (double& v : *buf) {
    double d = v - mean;
    v = d * d;
  }
  double ssq = pairwise_sum(buf->data(), buf->size());
  ValueEstimate e;
  e.value = mean;
  e.paths = n;
  e.std_error =
      n > 1 ? std::sqrt(ssq / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n)) : 0.0;
  return e;
}

}  // namespace

void CoupledSpec::validate(int dim) const {
  if (paths < 1) throw ConfigError("coupled_simulate: need at least one path");
  if (steps < 1) throw ConfigError("coupled_simulate: need at least one step");
  if (dim < 1 || dim > kMaxDim) throw DimensionError("coupled_simulate: dimension out of range");
  for (int k : probe_steps)
    if (k < 0 || k >= steps) throw ConfigError("coupled_simulate: probe step out of range");
  if (store_paths && paths * static_cast<std::int64_t>(steps) * dim > 300'000'000)
    throw ConfigError("coupled_simulate: store_paths run too large");
}

CoupledBundle coupled_simulate(const DriftPolicy& u, const DriftPolicy& v,
                               const CoupledSpec& spec) {
  if (u.dim() != v.dim()) throw DimensionError("coupled_simulate: drift dimension mismatch");
  const int dim = u.dim();
  spec.validate(dim);
  const int steps = spec.steps;
  const std::int64_t paths = spec.paths;
  const double dt = 1.0 / steps;
  const double sqrt_dt = std::sqrt(dt);
  const AffineTable tu = build_table(u, steps, dt);
  const AffineTable tv = build_table(v, steps, dt);
  const int nprobe = static_cast<int>(spec.probe_steps.size());
  std::vector<int> slot(static_cast<std::size_t>(steps), -1);
  for (int s = 0; s < nprobe; ++s) slot[static_cast<std::size_t>(spec.probe_steps[s])] = s;

  CoupledBundle b;
  b.dim = dim;
  b.steps = steps;
  b.paths = paths;
  b.dt = dt;
  b.seed = spec.seed;
  b.u_label = u.label();
  b.v_label = v.label();
  b.probe_steps = spec.probe_steps;
  b.x_terminal.assign(static_cast<std::size_t>(paths) * dim, 0.0);
  b.y_terminal.assign(static_cast<std::size_t>(paths) * dim, 0.0);
  b.x_cost.assign(static_cast<std::size_t>(paths), 0.0);
  b.y_cost.assign(static_cast<std::size_t>(paths), 0.0);
  b.u_int.assign(static_cast<std::size_t>(paths) * dim, 0.0);
  b.v_int.assign(static_cast<std::size_t>(paths) * dim, 0.0);
  b.cross_l2.assign(static_cast<std::size_t>(paths), 0.0);
  b.probe_u.assign(static_cast<std::size_t>(paths) * nprobe * dim, 0.0);
  b.probe_v.assign(static_cast<std::size_t>(paths) * nprobe * dim, 0.0);
  if (spec.store_paths) b.increments.assign(static_cast<std::size_t>(paths) * steps * dim, 0.0);

  int clamp_steps = 0;
  for (int k = 0; k < steps; ++k) {
    if (u.clamps_at(dt * k)) ++clamp_steps;
    if (v.clamps_at(dt * k)) ++clamp_steps;
  }
  b.clamped_evals = static_cast<std::int64_t>(clamp_steps) * paths;

  std::atomic<std::int64_t> first_bad{-1};
  const std::int64_t nchunks = (paths + kChunk - 1) / kChunk;
  parallel_for(nchunks, [&](std::int64_t ci) {
    std::vector<double> inc(static_cast<std::size_t>(steps) * dim);
    std::vector<double> uval(static_cast<std::size_t>(steps) * dim);
    const std::int64_t p_lo = ci * kChunk;
    const std::int64_t p_hi = std::min(paths, p_lo + kChunk);
    for (std::int64_t p = p_lo; p < p_hi; ++p) {
      NormalStream st(spec.seed, StreamPurpose::kPathIncrements, static_cast<std::uint64_t>(p));
      for (int k = 0; k < steps; ++k)
        for (int d = 0; d < dim; ++d)
          inc[static_cast<std::size_t>(k) * dim + d] =
              sqrt_dt * st.normal(static_cast<std::uint64_t>(k) * dim + d);
      if (spec.store_paths)
        std::copy(inc.begin(), inc.end(),
                  b.increments.begin() + static_cast<std::size_t>(p) * steps * dim);

      // Forward chain, keeping each u_k for the reversed pairing.
      Vec x(dim);
      double cost_u = 0.0;
      Vec iu(dim);
      bool ok = true;
      for (int k = 0; k < steps && ok; ++k) {
        Vec uk(dim);
        if (tu.active) {
          uk = tu.g[static_cast<std::size_t>(k)].apply(x) + tu.b[static_cast<std::size_t>(k)];
        } else {
          try {
            uk = u.value(dt * k, x);
          } catch (...) {
            ok = false;
            break;
          }
        }
        if (!uk.all_finite()) {
          ok = false;
          break;
        }
        cost_u += 0.5 * uk.norm2() * dt;
        if (slot[static_cast<std::size_t>(k)] >= 0)
          for (int d = 0; d < dim; ++d)
            b.probe_u[(static_cast<std::size_t>(p) * nprobe + slot[static_cast<std::size_t>(k)]) *
                          dim +
                      d] = uk[d];
        for (int d = 0; d < dim; ++d) {
          uval[static_cast<std::size_t>(k) * dim + d] = uk[d];
          iu[d] += uk[d] * dt;
          x[d] = x[d] + uk[d] * dt + inc[static_cast<std::size_t>(k) * dim + d];
        }
      }

      // Backward chain on the reversed increments; step j pairs with
      // forward step steps-1-j (the shared increment).
      Vec y(dim);
      double cost_v = 0.0, cross = 0.0;
      Vec iv(dim);
      for (int j = 0; j < steps && ok; ++j) {
        Vec vj(dim);
        if (tv.active) {
          vj = tv.g[static_cast<std::size_t>(j)].apply(y) + tv.b[static_cast<std::size_t>(j)];
        } else {
          try {
            vj = v.value(dt * j, y);
          } catch (...) {
            ok = false;
            break;
          }
        }
        if (!vj.all_finite()) {
          ok = false;
          break;
        }
        cost_v += 0.5 * vj.norm2() * dt;
        if (slot[static_cast<std::size_t>(j)] >= 0)
          for (int d = 0; d < dim; ++d)
            b.probe_v[(static_cast<std::size_t>(p) * nprobe + slot[static_cast<std::size_t>(j)]) *
                          dim +
                      d] = vj[d];
        const int paired = steps - 1 - j;
        double w2 = 0.0;
        for (int d = 0; d < dim; ++d) {
          double w = uval[static_cast<std::size_t>(paired) * dim + d] - vj[d];
          w2 += w * w;
          iv[d] += vj[d] * dt;
          y[d] = y[d] + vj[d] * dt + inc[static_cast<std::size_t>(paired) * dim + d];
        }
        cross += w2 * dt;
      }

      if (!ok) {
        std::int64_t expect = -1;
        first_bad.compare_exchange_strong(expect, p);
        return;
      }
      for (int d = 0; d < dim; ++d) {
        b.x_terminal[static_cast<std::size_t>(p) * dim + d] = x[d];
        b.y_terminal[static_cast<std::size_t>(p) * dim + d] = y[d];
        b.u_int[static_cast<std::size_t>(p) * dim + d] = iu[d];
        b.v_int[static_cast<std::size_t>(p) * dim + d] = iv[d];
      }
      b.x_cost[static_cast<std::size_t>(p)] = cost_u;
      b.y_cost[static_cast<std::size_t>(p)] = cost_v;
      b.cross_l2[static_cast<std::size_t>(p)] = cross;
    }
  });
  if (std::int64_t bad = first_bad.load(); bad >= 0)
    throw SimulationError("coupled_simulate: non-finite drift on path " + std::to_string(bad));
  return b;
}

Vec CoupledBundle::x_terminal_at(std::int64_t p) const {
  Vec x(dim);
  for (int d = 0; d < dim; ++d) x[d] = x_terminal[static_cast<std::size_t>(p) * dim + d];
  return x;
}
Vec CoupledBundle::y_terminal_at(std::int64_t p) const {
  Vec x(dim);
  for (int d = 0; d < dim; ++d) x[d] = y_terminal[static_cast<std::size_t>(p) * dim + d];
  return x;
}
Vec CoupledBundle::u_int_at(std::int64_t p) const {
  Vec x(dim);
  for (int d = 0; d < dim; ++d) x[d] = u_int[static_cast<std::size_t>(p) * dim + d];
  return x;
}
Vec CoupledBundle::v_int_at(std::int64_t p) const {
  Vec x(dim);
  for (int d = 0; d < dim; ++d) x[d] = v_int[static_cast<std::size_t>(p) * dim + d];
  return x;
}
Vec CoupledBundle::probe_u_at(std::int64_t p, int s) const {
  Vec x(dim);
  int np = static_cast<int>(probe_steps.size());
  for (int d = 0; d < dim; ++d)
    x[d] = probe_u[(static_cast<std::size_t>(p) * np + s) * dim + d];
  return x;
}
Vec CoupledBundle::probe_v_at(std::int64_t p, int s) const {
  Vec x(dim);
  int np = static_cast<int>(probe_steps.size());
  for (int d = 0; d < dim; ++d)
    x[d] = probe_v[(static_cast<std::size_t>(p) * np + s) * dim + d];
  return x;
}

CoupledRun coupled_run(const Potential& phi, double c, const CoupledSpec& spec) {
  QuadratureRule rule = QuadratureRule::default_for_dim(phi.dim());
  if (std::abs(c - 0.5) < 1e-12) {
    Vec bary = barycenter(phi, rule);
    if (bary.norm() > 1e-8)
      throw CenteringError("coupled_run: c = 1/2 requires a centered potential; barycenter is " +
                           bary.str());
  }
  Potential psi = moreau_partner(phi, c);
  DriftPolicy u = follmer_drift(phi, rule);
  DriftPolicy v = follmer_drift(psi, rule);
  return CoupledRun{std::move(psi), coupled_simulate(u, v, spec)};
}

OrthogonalityStat orthogonality_stat(const CoupledBundle& bundle, int slot_u, int slot_v) {
  const std::int64_t n = bundle.paths;
  const int dim = bundle.dim;
  OrthogonalityStat st;
  st.forward_step = bundle.probe_steps[static_cast<std::size_t>(slot_u)];
  st.backward_step = bundle.probe_steps[static_cast<std::size_t>(slot_v)];
  std::vector<double> inner(static_cast<std::size_t>(n));
  parallel_for(n, [&](std::int64_t p) {
    inner[static_cast<std::size_t>(p)] = bundle.probe_u_at(p, slot_u).dot(bundle.probe_v_at(p, slot_v));
  });
  std::vector<double> tmp = inner;
  ValueEstimate ei = estimate_of(&tmp);
  st.mean_inner = ei.value;
  st.se_inner = ei.std_error;

  st.mean_u = Vec(dim);
  st.mean_v = Vec(dim);
  std::vector<double> coord(static_cast<std::size_t>(n));
  for (int d = 0; d < dim; ++d) {
    parallel_for(n, [&](std::int64_t p) {
      coord[static_cast<std::size_t>(p)] = bundle.probe_u_at(p, slot_u)[d];
    });
    st.mean_u[d] = pairwise_sum(coord.data(), coord.size()) / static_cast<double>(n);
    parallel_for(n, [&](std::int64_t p) {
      coord[static_cast<std::size_t>(p)] = bundle.probe_v_at(p, slot_v)[d];
    });
    st.mean_v[d] = pairwise_sum(coord.data(), coord.size()) / static_cast<double>(n);
  }
  // centered products: cov and its plug-in standard error
  parallel_for(n, [&](std::int64_t p) {
    Vec du = bundle.probe_u_at(p, slot_u) - st.mean_u;
    Vec dv = bundle.probe_v_at(p, slot_v) - st.mean_v;
    inner[static_cast<std::size_t>(p)] = du.dot(dv);
  });
  ValueEstimate ec = estimate_of(&inner);
  st.covariance = ec.value;
  st.se_covariance = ec.std_error;
  return st;
}

ChainReport chain_report(const Potential& phi, const Potential& psi, double c,
                         const CoupledBundle& bundle, double slack) {
  if (phi.dim() != bundle.dim || psi.dim() != bundle.dim)
    throw DimensionError("chain_report: dimension mismatch");
  const std::int64_t n = bundle.paths;
  ChainReport rep;
  rep.c = c;
  rep.slack = slack;

  std::vector<double> s_buf(static_cast<std::size_t>(n)), t_buf(static_cast<std::size_t>(n)),
      r_buf(static_cast<std::size_t>(n));
  std::vector<unsigned char> point_bad(static_cast<std::size_t>(n), 0),
      cs_bad(static_cast<std::size_t>(n), 0), id_bad(static_cast<std::size_t>(n), 0);
  std::vector<double> point_gap(static_cast<std::size_t>(n)), cs_gap(static_cast<std::size_t>(n)),
      id_err(static_cast<std::size_t>(n));
  std::atomic<bool> nonfinite{false};

  parallel_for(n, [&](std::int64_t p) {
    Vec x = bundle.x_terminal_at(p);
    Vec y = bundle.y_terminal_at(p);
    double fx = phi.value(x), gy = psi.value(y);
    double costs = bundle.x_cost[static_cast<std::size_t>(p)] + bundle.y_cost[static_cast<std::size_t>(p)];
    double d2 = (x - y).norm2();
    double cross = bundle.cross_l2[static_cast<std::size_t>(p)];
    if (!std::isfinite(fx) || !std::isfinite(gy)) nonfinite.store(true);
    s_buf[static_cast<std::size_t>(p)] = fx + gy - costs;
    t_buf[static_cast<std::size_t>(p)] = c * d2 - costs;
    r_buf[static_cast<std::size_t>(p)] = c * cross - costs;

    double pg = fx + gy - c * d2;
    point_gap[static_cast<std::size_t>(p)] = pg;
    point_bad[static_cast<std::size_t>(p)] =
        pg > slack * (1.0 + std::abs(fx) + std::abs(gy)) + slack ? 1 : 0;

    double cg = d2 - cross;  // Cauchy-Schwarz: |int w dt|^2 <= int |w|^2 dt
    cs_gap[static_cast<std::size_t>(p)] = cg;
    cs_bad[static_cast<std::size_t>(p)] = cg > slack * (1.0 + d2 + cross) + slack ? 1 : 0;

    Vec lhs = x - y;
    Vec rhs = bundle.u_int_at(p) - bundle.v_int_at(p);
    double err = 0.0;
    for (int d = 0; d < bundle.dim; ++d) err = std::max(err, std::abs(lhs[d] - rhs[d]));
    id_err[static_cast<std::size_t>(p)] = err;
    id_bad[static_cast<std::size_t>(p)] = err > slack ? 1 : 0;
  });
  if (nonfinite.load())
    throw SimulationError("chain_report: potential not finite at a terminal state");

  for (std::int64_t p = 0; p < n; ++p) {
    if (point_bad[static_cast<std::size_t>(p)] || cs_bad[static_cast<std::size_t>(p)] ||
        id_bad[static_cast<std::size_t>(p)]) {
      if (rep.offenders.size() < 16) rep.offenders.push_back(p);
    }
    rep.pointwise_violations += point_bad[static_cast<std::size_t>(p)];
    rep.cs_violations += cs_bad[static_cast<std::size_t>(p)];
    rep.identity_violations += id_bad[static_cast<std::size_t>(p)];
    rep.worst_pointwise_gap = std::max(rep.worst_pointwise_gap, point_gap[static_cast<std::size_t>(p)]);
    rep.worst_cs_gap = std::max(rep.worst_cs_gap, cs_gap[static_cast<std::size_t>(p)]);
    rep.worst_identity_err = std::max(rep.worst_identity_err, id_err[static_cast<std::size_t>(p)]);
  }
  rep.s = estimate_of(&s_buf);
  rep.t = estimate_of(&t_buf);
  rep.r = estimate_of(&r_buf);
  return rep;
}

}  // namespace santalo
