#include "santalo/transforms.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "santalo/parallel.hpp"

namespace santalo {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct HullPoint {
  double x, f;
};

// Conjugate of one sampled line: g(y_j) = max over the lower convex hull of
// (x_i, f_i) of x y - f. +inf samples are absent. Two-pointer merge; ys
// ascend, hull slopes ascend.
void conjugate_line(int n_in, double lo_in, double h_in, const double* f, std::size_t fs,
                    int n_out, double lo_out, double h_out, double* g, std::size_t gs,
                    std::vector<HullPoint>* hull) {
  hull->clear();
  for (int i = 0; i < n_in; ++i) {
    double v = f[static_cast<std::size_t>(i) * fs];
    if (v == kInf) continue;
    HullPoint p{lo_in + h_in * i, v};
    while (hull->size() >= 2) {
      const HullPoint& a = (*hull)[hull->size() - 2];
      const HullPoint& b = (*hull)[hull->size() - 1];
      // pop b unless it is strictly below chord a->p
      if ((b.f - a.f) * (p.x - a.x) >= (p.f - a.f) * (b.x - a.x))
        hull->pop_back();
      else
        break;
    }
    hull->push_back(p);
  }
  if (hull->empty()) {
    for (int j = 0; j < n_out; ++j) g[static_cast<std::size_t>(j) * gs] = -kInf;
    return;
  }
  std::size_t k = 0;
  for (int j = 0; j < n_out; ++j) {
    double y = lo_out + h_out * j;
    while (k + 1 < hull->size() &&
           (*hull)[k + 1].f - (*hull)[k].f <= y * ((*hull)[k + 1].x - (*hull)[k].x))
      ++k;
    g[static_cast<std::size_t>(j) * gs] = (*hull)[k].x * y - (*hull)[k].f;
  }
}

void reject_neg_inf(const GridFunction& f) {
  int nx = f.axis(0).count, ny = f.dim() == 2 ? f.axis(1).count : 1;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      if (f.node(i, j) == -kInf)
        throw IntegrabilityError("legendre_conjugate: input takes -inf; conjugate is +inf");
}

// One line of the lower parabola envelope:
//   out_j = min_i scale*(i-j)^2 + g_i,   +inf entries absent.
void envelope_line(int n, const double* g, std::size_t gs, double scale, double* out,
                   std::size_t os, std::vector<int>* vbuf, std::vector<double>* zbuf) {
  vbuf->assign(static_cast<std::size_t>(n), 0);
  zbuf->assign(static_cast<std::size_t>(n) + 1, 0.0);
  int* v = vbuf->data();
  double* z = zbuf->data();
  int k = -1;
  auto gval = [&](int i) { return g[static_cast<std::size_t>(i) * gs]; };
  for (int q = 0; q < n; ++q) {
    double gq = gval(q);
    if (gq == kInf) continue;
    double s = 0.0;
    while (k >= 0) {
      int p = v[k];
      s = ((gq - gval(p)) / scale + static_cast<double>(q) * q - static_cast<double>(p) * p) /
          (2.0 * (q - p));
      if (s <= z[k])
        --k;
      else
        break;
    }
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
    } else {
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = kInf;
    }
  }
  if (k < 0) {
    for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j) * os] = kInf;
    return;
  }
  int kk = 0;
  for (int j = 0; j < n; ++j) {
    while (z[kk + 1] < static_cast<double>(j)) ++kk;
    double d = static_cast<double>(j - v[kk]);
    out[static_cast<std::size_t>(j) * os] = scale * d * d + gval(v[kk]);
  }
}

// phi(x) + psi(y) <= c|x-y|^2 + slack over a sampled product; aborts on
// violation. Everything downstream assumes this, so it is always on.
template <class PhiAt, class PsiAt>
void assert_feasible_1d(PhiAt&& phi, PsiAt&& psi, double c, const Axis& ax, const Axis& ay,
                        int stride) {
  for (int i = 0; i < ax.count; i += stride) {
    double x = ax.coord(i), px = phi(x);
    if (px == -kInf) continue;
    for (int j = 0; j < ay.count; j += stride) {
      double y = ay.coord(j), py = psi(y);
      if (py == -kInf) continue;
      double gap = px + py - c * (x - y) * (x - y);
      if (gap > 1e-9 * (1.0 + std::abs(px) + std::abs(py)) + 1e-9)
        throw Error("moreau_partner: defining inequality violated (gap " + std::to_string(gap) +
                    " at x=" + std::to_string(x) + ", y=" + std::to_string(y) + ")");
    }
  }
}

template <class PhiAt, class PsiAt>
void assert_feasible_2d(PhiAt&& phi, PsiAt&& psi, double c, const Axis& ax, const Axis& ay,
                        int stride) {
  for (int i0 = 0; i0 < ax.count; i0 += stride)
    for (int i1 = 0; i1 < ay.count; i1 += stride) {
      Vec x{ax.coord(i0), ay.coord(i1)};
      double px = phi(x);
      if (px == -kInf) continue;
      for (int j0 = 0; j0 < ax.count; j0 += stride)
        for (int j1 = 0; j1 < ay.count; j1 += stride) {
          Vec y{ax.coord(j0), ay.coord(j1)};
          double py = psi(y);
          if (py == -kInf) continue;
          double gap = px + py - c * (x - y).norm2();
          if (gap > 1e-9 * (1.0 + std::abs(px) + std::abs(py)) + 1e-9)
            throw Error("moreau_partner: defining inequality violated (gap " +
                        std::to_string(gap) + ")");
        }
    }
}

GridFunction conjugate_1d(const GridFunction& f, Axis out) {
  out.validate();
  GridFunction g(out, OutsideValue::kPosInfinity);
  const Axis& in = f.axis(0);
  std::vector<HullPoint> hull;
  std::vector<double> fv(static_cast<std::size_t>(in.count));
  for (int i = 0; i < in.count; ++i) fv[static_cast<std::size_t>(i)] = f.node(i);
  conjugate_line(in.count, in.lo, in.step(), fv.data(), 1, out.count, out.lo, out.step(),
                 &g.node(0), 1, &hull);
  return g;
}

GridFunction conjugate_2d(const GridFunction& f, Axis out_x, Axis out_y) {
  out_x.validate();
  out_y.validate();
  const Axis& ix = f.axis(0);
  const Axis& iy = f.axis(1);
  const std::size_t ny_out = static_cast<std::size_t>(out_y.count);
  // Pass 1: conjugate along x2 for each grid row; store the negated result so
  // pass 2 can conjugate columns directly:
  //   f*(y1,y2) = sup_x1 [ x1 y1 - ( -sup_x2 (x2 y2 - f(x1,x2)) ) ].
  std::vector<double> t(static_cast<std::size_t>(ix.count) * ny_out);
  parallel_for(ix.count, [&](std::int64_t i) {
    std::vector<HullPoint> hull;
    std::vector<double> row(static_cast<std::size_t>(iy.count));
    for (int j = 0; j < iy.count; ++j) row[static_cast<std::size_t>(j)] = f.node(static_cast<int>(i), j);
    conjugate_line(iy.count, iy.lo, iy.step(), row.data(), 1, out_y.count, out_y.lo, out_y.step(),
                   &t[static_cast<std::size_t>(i) * ny_out], 1, &hull);
    for (std::size_t j = 0; j < ny_out; ++j) {
      double& v = t[static_cast<std::size_t>(i) * ny_out + j];
      v = -v;  // -(-inf) = +inf marks absent columns for pass 2
    }
  });
  GridFunction g(out_x, out_y, OutsideValue::kPosInfinity);
  parallel_for(out_y.count, [&](std::int64_t j) {
    std::vector<HullPoint> hull;
    conjugate_line(ix.count, ix.lo, ix.step(), &t[static_cast<std::size_t>(j)], ny_out,
                   out_x.count, out_x.lo, out_x.step(), &g.node(0, static_cast<int>(j)), ny_out,
                   &hull);
  });
  return g;
}

double radial_conjugate_coeff(double coeff, double p, double* q_out) {
  // (coeff * r^p)* = beta * s^q with 1/p + 1/q = 1 (radial profile conjugate).
  double q = p / (p - 1.0);
  *q_out = q;
  return std::pow(coeff * p, 1.0 - q) / q;
}

}  // namespace

GridFunction legendre_conjugate(const GridFunction& f, Axis out_x, Axis out_y) {
  if (f.dim() != 2) throw DimensionError("legendre_conjugate: grid is not 2D");
  reject_neg_inf(f);
  return conjugate_2d(f, out_x, out_y);
}

GridFunction legendre_conjugate(const GridFunction& f, Axis out) {
  reject_neg_inf(f);
  if (f.dim() == 1) return conjugate_1d(f, out);
  return conjugate_2d(f, out, f.axis(1));
}

GridFunction legendre_conjugate(const GridFunction& f) {
  reject_neg_inf(f);
  if (f.dim() == 1) return conjugate_1d(f, f.axis(0));
  return conjugate_2d(f, f.axis(0), f.axis(1));
}

GridFunction moreau_partner_grid(const GridFunction& phi, double c) {
  if (!(c > 0.0)) throw ConfigError("moreau_partner: c must be positive");
  if (phi.dim() == 1) {
    const Axis& ax = phi.axis(0);
    double scale = c * ax.step() * ax.step();
    std::vector<double> g(static_cast<std::size_t>(ax.count));
    for (int i = 0; i < ax.count; ++i) {
      double v = phi.node(i);
      g[static_cast<std::size_t>(i)] = v == -kInf ? kInf : -v;
    }
    GridFunction psi(ax, OutsideValue::kNegInfinity);
    std::vector<int> vbuf;
    std::vector<double> zbuf;
    envelope_line(ax.count, g.data(), 1, scale, &psi.node(0), 1, &vbuf, &zbuf);
    if (psi.node(0) == kInf && psi.node(ax.count - 1) == kInf)
      throw IntegrabilityError("moreau_partner: potential is -inf everywhere");
    return psi;
  }
  const Axis& ax = phi.axis(0);
  const Axis& ay = phi.axis(1);
  const std::size_t ny = static_cast<std::size_t>(ay.count);
  double sx = c * ax.step() * ax.step();
  double sy = c * ay.step() * ay.step();
  // Separable envelope: rows in x2 first, then columns in x1.
  std::vector<double> t(static_cast<std::size_t>(ax.count) * ny);
  parallel_for(ax.count, [&](std::int64_t i) {
    std::vector<int> vbuf;
    std::vector<double> zbuf;
    std::vector<double> row(ny);
    for (int j = 0; j < ay.count; ++j) {
      double v = phi.node(static_cast<int>(i), j);
      row[static_cast<std::size_t>(j)] = v == -kInf ? kInf : -v;
    }
    envelope_line(ay.count, row.data(), 1, sy, &t[static_cast<std::size_t>(i) * ny], 1, &vbuf,
                  &zbuf);
  });
  GridFunction psi(ax, ay, OutsideValue::kNegInfinity);
  parallel_for(ay.count, [&](std::int64_t j) {
    std::vector<int> vbuf;
    std::vector<double> zbuf;
    envelope_line(ax.count, &t[static_cast<std::size_t>(j)], ny, sx,
                  &psi.node(0, static_cast<int>(j)), ny, &vbuf, &zbuf);
  });
  bool any = false;
  for (int i = 0; i < ax.count && !any; ++i)
    for (int j = 0; j < ay.count && !any; ++j) any = psi.node(i, j) != kInf;
  if (!any) throw IntegrabilityError("moreau_partner: potential is -inf everywhere");
  return psi;
}

Potential moreau_partner(const Potential& phi, double c) {
  if (!(c > 0.0)) throw ConfigError("moreau_partner: c must be positive");
  if (phi.is_pure_quadratic()) {
    const auto& qp = phi.quad_part();
    SymMat a = qp.q.plus_scaled_identity(2.0 * c);
    if (!a.is_positive_definite(1e-12))
      throw IntegrabilityError("moreau_partner: phi is not c-semiconcave; partner is -inf");
    SymMat ainv = a.inverse();
    SymMat qpsi = ainv.scaled(4.0 * c * c).plus_scaled_identity(-2.0 * c);
    Vec ainv_a = ainv.apply(qp.a);
    Vec apsi = (-2.0 * c) * ainv_a;
    double cpsi = -0.5 * qp.a.dot(ainv_a) - qp.c;
    Potential psi = Potential::quadratic(qpsi, apsi, cpsi);
    // Probe the defining inequality: catches coefficient plumbing mistakes.
    Axis probe{-8.0, 8.0, phi.dim() == 1 ? 101 : 21};
    if (phi.dim() == 1) {
      assert_feasible_1d([&](double x) { return phi.value(Vec{x}); },
                         [&](double y) { return psi.value(Vec{y}); }, c, probe, probe, 1);
    } else if (phi.dim() == 2) {
      assert_feasible_2d([&](const Vec& x) { return phi.value(x); },
                         [&](const Vec& y) { return psi.value(y); }, c, probe, probe, 1);
    }
    return psi;
  }
  if (phi.dim() > 2) throw DimensionError("moreau_partner: grid route supports dim <= 2");
  if (phi.dim() == 1) {
    Axis ax;  // default box
    GridFunction sampled =
        GridFunction::sample1([&](double x) { return phi.value(Vec{x}); }, ax,
                              OutsideValue::kNegInfinity);
    GridFunction psi = moreau_partner_grid(sampled, c);
    assert_feasible_1d([&](double x) { return sampled.value(x); },
                       [&](double y) { return psi.value(y); }, c, ax, ax, 1);
    return Potential::grid_backed(std::move(psi));
  }
  Axis ax;
  GridFunction sampled = GridFunction::sample2(
      [&](double x, double y) { return phi.value(Vec{x, y}); }, ax, ax,
      OutsideValue::kNegInfinity);
  GridFunction psi = moreau_partner_grid(sampled, c);
  assert_feasible_2d([&](const Vec& x) { return sampled.value_at(x); },
                     [&](const Vec& y) { return psi.value_at(y); }, c, ax, ax, 32);
  return Potential::grid_backed(std::move(psi));
}

Potential polar_function(const Potential& logf) {
  const auto& qp = logf.quad_part();
  bool linear_zero = true;
  for (int i = 0; i < logf.dim(); ++i)
    if (qp.a[i] != 0.0) linear_zero = false;
  auto shift_zero = [](const Vec& s) {
    for (int i = 0; i < s.dim(); ++i)
      if (s[i] != 0.0) return false;
    return true;
  };

  if (logf.is_pure_quadratic() && linear_zero) {
    // log g = -y' Q^{-1} y / 2 - c
    if (!qp.q.is_positive_definite(1e-14))
      throw IntegrabilityError("polar_function: Gaussian part must be positive definite");
    return Potential::quadratic(qp.q.inverse(), Vec(logf.dim()), -qp.c);
  }
  if (const auto* r = logf.radial_term();
      r && linear_zero && qp.q.is_zero() && shift_zero(r->shift) && r->coeff > 0.0 &&
      r->power > 1.0) {
    double q = 0.0;
    double beta = radial_conjugate_coeff(r->coeff, r->power, &q);
    return Potential::radial_power(logf.dim(), q, beta).plus_constant(-qp.c);
  }
  if (const auto* gt = logf.gauge_term();
      gt && linear_zero && qp.q.is_zero() && shift_zero(gt->shift) && gt->coeff > 0.0 &&
      gt->power > 1.0) {
    double q = 0.0;
    double beta = radial_conjugate_coeff(gt->coeff, gt->power, &q);
    auto polar_body = std::make_shared<ConvexPolygon>(gt->body->polar());
    return Potential::gauge_power(std::move(polar_body), q, beta).plus_constant(-qp.c);
  }

  if (logf.dim() > 2) throw DimensionError("polar_function: grid route supports dim <= 2");
  Axis ax;  // default box
  if (logf.dim() == 1) {
    GridFunction v = GridFunction::sample1([&](double x) { return -logf.value(Vec{x}); }, ax,
                                           OutsideValue::kPosInfinity);
    GridFunction conj = legendre_conjugate(v);
    GridFunction out(ax, OutsideValue::kNegInfinity);
    for (int i = 0; i < ax.count; ++i) out.node(i) = -conj.node(i);
    return Potential::grid_backed(std::move(out));
  }
  GridFunction v = GridFunction::sample2(
      [&](double x, double y) { return -logf.value(Vec{x, y}); }, ax, ax,
      OutsideValue::kPosInfinity);
  GridFunction conj = legendre_conjugate(v);
  GridFunction out(ax, ax, OutsideValue::kNegInfinity);
  for (int i = 0; i < ax.count; ++i)
    for (int j = 0; j < ax.count; ++j) out.node(i, j) = -conj.node(i, j);
  return Potential::grid_backed(std::move(out));
}

namespace ref {

GridFunction legendre_conjugate(const GridFunction& f, Axis out) {
  reject_neg_inf(f);
  if (f.dim() == 1) {
    const Axis& in = f.axis(0);
    GridFunction g(out, OutsideValue::kPosInfinity);
    for (int j = 0; j < out.count; ++j) {
      double y = out.coord(j), best = -kInf;
      for (int i = 0; i < in.count; ++i) {
        double v = f.node(i);
        if (v == kInf) continue;
        best = std::max(best, in.coord(i) * y - v);
      }
      g.node(j) = best;
    }
    return g;
  }
  const Axis& ix = f.axis(0);
  const Axis& iy = f.axis(1);
  GridFunction g(out, out, OutsideValue::kPosInfinity);
  for (int j0 = 0; j0 < out.count; ++j0)
    for (int j1 = 0; j1 < out.count; ++j1) {
      double y0 = out.coord(j0), y1 = out.coord(j1), best = -kInf;
      for (int i0 = 0; i0 < ix.count; ++i0)
        for (int i1 = 0; i1 < iy.count; ++i1) {
          double v = f.node(i0, i1);
          if (v == kInf) continue;
          best = std::max(best, ix.coord(i0) * y0 + iy.coord(i1) * y1 - v);
        }
      g.node(j0, j1) = best;
    }
  return g;
}

GridFunction moreau_partner_grid(const GridFunction& phi, double c) {
  if (!(c > 0.0)) throw ConfigError("moreau_partner: c must be positive");
  if (phi.dim() == 1) {
    const Axis& ax = phi.axis(0);
    GridFunction psi(ax, OutsideValue::kNegInfinity);
    for (int j = 0; j < ax.count; ++j) {
      double y = ax.coord(j), best = kInf;
      for (int i = 0; i < ax.count; ++i) {
        double v = phi.node(i);
        if (v == -kInf) continue;
        double x = ax.coord(i);
        best = std::min(best, c * (x - y) * (x - y) - v);
      }
      psi.node(j) = best;
    }
    return psi;
  }
  const Axis& ax = phi.axis(0);
  const Axis& ay = phi.axis(1);
  GridFunction psi(ax, ay, OutsideValue::kNegInfinity);
  for (int j0 = 0; j0 < ax.count; ++j0)
    for (int j1 = 0; j1 < ay.count; ++j1) {
      double y0 = ax.coord(j0), y1 = ay.coord(j1), best = kInf;
      for (int i0 = 0; i0 < ax.count; ++i0)
        for (int i1 = 0; i1 < ay.count; ++i1) {
          double v = phi.node(i0, i1);
          if (v == -kInf) continue;
          double dx = ax.coord(i0) - y0, dy = ay.coord(i1) - y1;
          best = std::min(best, c * (dx * dx + dy * dy) - v);
        }
      psi.node(j0, j1) = best;
    }
  return psi;
}

}  // namespace ref
}  // namespace santalo
