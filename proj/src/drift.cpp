#include "santalo/drift.hpp"

#include <cmath>
#include <limits>

namespace santalo {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool closed_form_heat(const Potential& phi) { return phi.is_pure_quadratic(); }

// log P_s e^phi and its gradient for phi = -x'Qx/2 + a.x + c:
//   log P_s e^phi(x) = -log det(I+sQ)/2 + phi(x) + s/2 (a-Qx)'(I+sQ)^{-1}(a-Qx)
//   grad            = (I+sQ)^{-1} (a - Qx)
double log_heat_quadratic(const Potential::QuadPart& qp, double s, const Vec& x) {
  SymMat m = qp.q.scaled(s).plus_scaled_identity(1.0);
  Vec r = qp.a - qp.q.apply(x);
  double base = -0.5 * qp.q.quad(x) + qp.a.dot(x) + qp.c;
  return -0.5 * m.log_det() + base + 0.5 * s * r.dot(m.solve(r));
}

Vec grad_log_heat_quadratic(const Potential::QuadPart& qp, double s, const Vec& x) {
  SymMat m = qp.q.scaled(s).plus_scaled_identity(1.0);
  return m.solve(qp.a - qp.q.apply(x));
}

// Shared tensor sweep for the quadrature path; fills the log-weighted
// integrand and optional node-coordinate moments.
struct HeatSums {
  double log_value = 0.0;
  Vec moment;  // E-hat[z * e^phi] / E-hat[e^phi]
};

HeatSums heat_sums(const Potential& phi, double s, const Vec& x, const QuadratureRule& rule,
                   bool want_moment) {
  const int dim = phi.dim();
  if (dim > 3) throw DimensionError("semigroup quadrature supports dim <= 3");
  const int m = rule.points_per_axis();
  const auto& nodes = rule.nodes();
  const auto& logw = rule.log_weights();
  const double rt = std::sqrt(s);
  std::int64_t total = 1;
  for (int d = 0; d < dim; ++d) total *= m;

  double mx = -kInf;
  std::vector<double> a(static_cast<std::size_t>(total));
  std::vector<int> idx(static_cast<std::size_t>(total) * dim);
  for (std::int64_t i = 0; i < total; ++i) {
    std::int64_t rem = i;
    Vec y = x;
    double lw = 0.0;
    for (int d = dim - 1; d >= 0; --d) {
      int k = static_cast<int>(rem % m);
      rem /= m;
      idx[static_cast<std::size_t>(i) * dim + d] = k;
      y[d] += rt * nodes[k];
      lw += logw[k];
    }
    double v = lw + phi.value(y);
    a[static_cast<std::size_t>(i)] = v;
    if (v > mx) mx = v;
  }
  if (mx == -kInf) throw IntegrabilityError("heat semigroup: integrand has no mass");
  double denom = 0.0;
  Vec num(dim);
  for (std::int64_t i = 0; i < total; ++i) {
    double w = std::exp(a[static_cast<std::size_t>(i)] - mx);
    denom += w;
    if (want_moment)
      for (int d = 0; d < dim; ++d)
        num[d] += w * nodes[idx[static_cast<std::size_t>(i) * dim + d]];
  }
  HeatSums out;
  out.log_value = mx + std::log(denom);
  if (want_moment) out.moment = (1.0 / denom) * num;
  return out;
}

}  // namespace

double log_heat(const Potential& phi, double s, const Vec& x, const QuadratureRule& rule) {
  if (s < 0.0) throw ConfigError("log_heat: s must be >= 0");
  if (s == 0.0) return phi.value(x);
  if (closed_form_heat(phi)) return log_heat_quadratic(phi.quad_part(), s, x);
  return heat_sums(phi, s, x, rule, false).log_value;
}

Vec grad_log_heat(const Potential& phi, double s, const Vec& x, const QuadratureRule& rule) {
  if (s < 0.0) throw ConfigError("grad_log_heat: s must be >= 0");
  if (s == 0.0) return phi.gradient(x);
  if (closed_form_heat(phi)) return grad_log_heat_quadratic(phi.quad_part(), s, x);
  HeatSums hs = heat_sums(phi, s, x, rule, true);
  return (1.0 / std::sqrt(s)) * hs.moment;
}

DriftPolicy DriftPolicy::zero(int dim) {
  DriftPolicy p;
  p.kind_ = Kind::kZero;
  p.dim_ = dim;
  p.q_ = SymMat(dim);
  p.a_ = Vec(dim);
  p.label_ = "zero";
  return p;
}

DriftPolicy DriftPolicy::constant(Vec a) {
  DriftPolicy p;
  p.kind_ = Kind::kConstant;
  p.dim_ = a.dim();
  p.q_ = SymMat(a.dim());
  p.a_ = std::move(a);
  p.label_ = "constant";
  return p;
}

DriftPolicy DriftPolicy::quadratic(SymMat q, Vec a) {
  if (q.dim() != a.dim()) throw DimensionError("DriftPolicy::quadratic: dimension mismatch");
  if (!q.plus_scaled_identity(1.0).is_positive_definite(1e-12))
    throw IntegrabilityError("DriftPolicy::quadratic: I + Q must be positive definite");
  DriftPolicy p;
  p.kind_ = Kind::kQuadratic;
  p.dim_ = q.dim();
  p.q_ = std::move(q);
  p.a_ = std::move(a);
  p.label_ = "follmer-quadratic";
  return p;
}

DriftPolicy DriftPolicy::semigroup(Potential phi, QuadratureRule rule, double s_min) {
  if (!(s_min > 0.0)) throw ConfigError("DriftPolicy::semigroup: s_min must be positive");
  DriftPolicy p;
  p.kind_ = Kind::kSemigroup;
  p.dim_ = phi.dim();
  p.q_ = SymMat(phi.dim());
  p.a_ = Vec(phi.dim());
  p.phi_ = std::make_shared<Potential>(std::move(phi));
  p.rule_ = std::make_shared<QuadratureRule>(std::move(rule));
  p.s_min_ = s_min;
  p.label_ = "follmer-semigroup";
  return p;
}

DriftPolicy DriftPolicy::with_label(std::string label) const {
  DriftPolicy p = *this;
  p.label_ = std::move(label);
  return p;
}

Vec DriftPolicy::value(double t, const Vec& x) const {
  if (x.dim() != dim_) throw DimensionError("DriftPolicy::value: dimension mismatch");
  switch (kind_) {
    case Kind::kZero:
      return Vec(dim_);
    case Kind::kConstant:
      return a_;
    case Kind::kQuadratic: {
      double s = 1.0 - t;
      SymMat m = q_.scaled(s).plus_scaled_identity(1.0);
      return m.solve(a_ - q_.apply(x));
    }
    case Kind::kSemigroup: {
      double s = std::max(1.0 - t, s_min_);
      return grad_log_heat(*phi_, s, x, *rule_);
    }
  }
  return Vec(dim_);
}

void DriftPolicy::affine_at(double t, SymMat* g, Vec* b) const {
  switch (kind_) {
    case Kind::kZero:
      *g = SymMat(dim_);
      *b = Vec(dim_);
      return;
    case Kind::kConstant:
      *g = SymMat(dim_);
      *b = a_;
      return;
    case Kind::kQuadratic: {
      double s = 1.0 - t;
      SymMat inv = q_.scaled(s).plus_scaled_identity(1.0).inverse();
      // -(I+sQ)^{-1} Q is symmetric: both factors are functions of Q.
      SymMat gm(dim_);
      for (int j = 0; j < dim_; ++j) {
        Vec col = inv.apply(q_.apply(Vec::unit(dim_, j)));
        for (int i = 0; i < dim_; ++i) gm.set(i, j, -col[i]);
      }
      *g = gm;
      *b = inv.apply(a_);
      return;
    }
    case Kind::kSemigroup:
      throw Error("DriftPolicy::affine_at: semigroup drift is not affine");
  }
}

bool DriftPolicy::clamps_at(double t) const {
  return kind_ == Kind::kSemigroup && (1.0 - t) < s_min_;
}

DriftPolicy follmer_drift(const Potential& phi, const QuadratureRule& rule, double s_min) {
  if (phi.is_pure_quadratic()) return DriftPolicy::quadratic(phi.quad_part().q, phi.quad_part().a);
  return DriftPolicy::semigroup(phi, rule, s_min);
}

DriftPolicy follmer_drift(const Potential& phi) {
  if (phi.is_pure_quadratic()) return DriftPolicy::quadratic(phi.quad_part().q, phi.quad_part().a);
  return follmer_drift(phi, QuadratureRule::default_for_dim(phi.dim()));
}

}  // namespace santalo
