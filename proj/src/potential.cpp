#include "santalo/potential.hpp"

#include <cmath>

namespace santalo {
namespace {

Vec sub(const Vec& x, const Vec& s) {
  Vec r = x;
  r -= s;
  return r;
}

}  // namespace

Potential::Potential(int dim, QuadPart quad, Extra extra)
    : dim_(dim), quad_(std::move(quad)), extra_(std::move(extra)) {
  if (dim_ < 1 || dim_ > kMaxDim) throw DimensionError("Potential: dimension out of range");
  if (quad_.q.dim() != dim_ || quad_.a.dim() != dim_)
    throw DimensionError("Potential: quadratic part dimension mismatch");
}

Potential Potential::constant(int dim, double c) {
  return Potential(dim, {SymMat(dim), Vec(dim), c}, std::monostate{});
}

Potential Potential::linear(Vec a, double c) {
  int n = a.dim();
  return Potential(n, {SymMat(n), std::move(a), c}, std::monostate{});
}

Potential Potential::quadratic(SymMat q, Vec a, double c) {
  int n = q.dim();
  return Potential(n, {std::move(q), std::move(a), c}, std::monostate{});
}

Potential Potential::isotropic_quadratic(int dim, double lambda) {
  return quadratic(SymMat::isotropic(dim, lambda), Vec(dim), 0.0);
}

Potential Potential::radial_power(int dim, double power, double coeff) {
  if (!(power >= 1.0)) throw ConfigError("radial_power: power must be >= 1");
  return Potential(dim, {SymMat(dim), Vec(dim), 0.0}, RadialTerm{power, coeff, Vec(dim)});
}

Potential Potential::gauge_power(std::shared_ptr<const ConvexPolygon> body, double power,
                                 double coeff) {
  if (!body) throw ConfigError("gauge_power: missing body");
  if (!(power >= 1.0)) throw ConfigError("gauge_power: power must be >= 1");
  return Potential(2, {SymMat(2), Vec(2), 0.0},
                   GaugeTerm{std::move(body), power, coeff, Vec(2)});
}

Potential Potential::grid_backed(GridFunction grid) {
  int n = grid.dim();
  return Potential(n, {SymMat(n), Vec(n), 0.0},
                   GridTerm{std::make_shared<GridFunction>(std::move(grid)), Vec(n)});
}

Potential::Kind Potential::kind() const {
  if (std::holds_alternative<RadialTerm>(extra_)) return Kind::kRadialPower;
  if (std::holds_alternative<GaugeTerm>(extra_)) return Kind::kGaugePower;
  if (std::holds_alternative<GridTerm>(extra_)) return Kind::kGridBacked;
  if (quad_.q.is_zero()) {
    for (int i = 0; i < dim_; ++i)
      if (quad_.a[i] != 0.0) return Kind::kLinear;
    return Kind::kConstant;
  }
  return Kind::kQuadratic;
}

double Potential::value(const Vec& x) const {
  if (x.dim() != dim_) throw DimensionError("Potential::value: dimension mismatch");
  double v = -0.5 * quad_.q.quad(x) + quad_.a.dot(x) + quad_.c;
  if (const auto* r = radial_term()) {
    v -= r->coeff * std::pow(sub(x, r->shift).norm(), r->power);
  } else if (const auto* g = gauge_term()) {
    Vec y = sub(x, g->shift);
    v -= g->coeff * std::pow(g->body->gauge(y[0], y[1]), g->power);
  } else if (const auto* t = grid_term()) {
    v += t->grid->value_at(sub(x, t->shift));
  }
  return v;
}

Vec Potential::gradient(const Vec& x) const {
  if (!has_gradient()) throw GradientError("Potential: gradient unavailable for this kind");
  if (x.dim() != dim_) throw DimensionError("Potential::gradient: dimension mismatch");
  Vec g = quad_.a - quad_.q.apply(x);
  if (const auto* r = radial_term()) {
    Vec d = sub(x, r->shift);
    double nrm = d.norm();
    if (nrm > 0.0) g -= (r->coeff * r->power * std::pow(nrm, r->power - 2.0)) * d;
    // power > 1: the gradient of |x|^p vanishes at the center
  } else if (const auto* gt = gauge_term()) {
    Vec d = sub(x, gt->shift);
    double gv = gt->body->gauge(d[0], d[1]);
    Point2 gg = gt->body->gauge_gradient(d[0], d[1]);
    double f = (gv > 0.0 || gt->power == 1.0)
                   ? gt->coeff * gt->power * std::pow(gv, gt->power - 1.0)
                   : 0.0;
    g[0] -= f * gg[0];
    g[1] -= f * gg[1];
  }
  return g;
}

bool Potential::has_gradient() const {
  if (const auto* r = radial_term()) return r->power > 1.0;
  if (gauge_term() != nullptr) return true;  // subgradient pick at kinks
  if (grid_term() != nullptr) return false;
  return true;
}

bool Potential::is_even() const {
  for (int i = 0; i < dim_; ++i)
    if (quad_.a[i] != 0.0) return false;
  auto shift_zero = [](const Vec& s) {
    for (int i = 0; i < s.dim(); ++i)
      if (s[i] != 0.0) return false;
    return true;
  };
  if (const auto* r = radial_term()) return shift_zero(r->shift);
  if (const auto* g = gauge_term())
    return shift_zero(g->shift) && g->body->is_origin_symmetric();
  if (const auto* t = grid_term()) return shift_zero(t->shift) && t->grid->is_even();
  return true;
}

Potential Potential::plus_constant(double c) const {
  Potential p = *this;
  p.quad_.c += c;
  return p;
}

Potential Potential::plus_half_square() const {
  Potential p = *this;
  p.quad_.q = p.quad_.q.plus_scaled_identity(-1.0);
  return p;
}

Potential Potential::minus_half_square() const {
  Potential p = *this;
  p.quad_.q = p.quad_.q.plus_scaled_identity(1.0);
  return p;
}

Potential Potential::shifted_density(const Vec& b) const {
  if (b.dim() != dim_) throw DimensionError("shifted_density: dimension mismatch");
  // phi'(x) = phi(x + b) - b.x - |b|^2/2 keeps e^{phi'} dgamma proportional
  // to the law of X - b.
  Potential p = *this;
  const SymMat& q = quad_.q;
  Vec qb = q.apply(b);
  p.quad_.a = quad_.a - qb - b;
  p.quad_.c = quad_.c + quad_.a.dot(b) - 0.5 * b.dot(qb) - 0.5 * b.norm2();
  if (auto* r = std::get_if<RadialTerm>(&p.extra_)) {
    r->shift -= b;
  } else if (auto* g = std::get_if<GaugeTerm>(&p.extra_)) {
    g->shift -= b;
  } else if (auto* t = std::get_if<GridTerm>(&p.extra_)) {
    t->shift -= b;
  }
  return p;
}

Potential Potential::with_label(std::string label) const {
  Potential p = *this;
  p.label_ = std::move(label);
  return p;
}

Potential santalo_to_tau(const Potential& logf) { return logf.plus_half_square(); }

Potential tau_to_santalo(const Potential& phi) { return phi.minus_half_square(); }

}  // namespace santalo
