#pragma once

#include <memory>
#include <string>

#include "santalo/potential.hpp"
#include "santalo/quadrature.hpp"
#include "santalo/vec.hpp"

namespace santalo {

// log P_s e^phi (x) for the heat semigroup P_s f(x) = E f(x + sqrt(s) Z).
// Closed form for quadratic-part-only potentials, Hermite quadrature
// otherwise. s = 0 returns phi(x).
double log_heat(const Potential& phi, double s, const Vec& x, const QuadratureRule& rule);

// grad_x log P_s e^phi (x). Quadrature path uses integration by parts:
//   grad log P_s e^phi = E[Z e^{phi(x+sqrt(s)Z)}] / (sqrt(s) E[e^{phi}]).
Vec grad_log_heat(const Potential& phi, double s, const Vec& x, const QuadratureRule& rule);

// Markov control u(t, x) plugged into dX = u dt + dB on [0, 1].
class DriftPolicy {
 public:
  enum class Kind { kZero, kConstant, kQuadratic, kSemigroup };

  static DriftPolicy zero(int dim);
  static DriftPolicy constant(Vec a);
  // u(t,x) = (I + (1-t) Q)^{-1} (a - Q x): the exact backward-heat drift for
  // a quadratic potential. Requires I + sQ positive definite on s in [0,1].
  static DriftPolicy quadratic(SymMat q, Vec a);
  // u(t,x) = grad log P_{1-t} e^phi (x), with 1-t clamped below by s_min.
  static DriftPolicy semigroup(Potential phi, QuadratureRule rule, double s_min = 1e-3);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const std::string& label() const { return label_; }
  [[nodiscard]] DriftPolicy with_label(std::string label) const;

  [[nodiscard]] Vec value(double t, const Vec& x) const;

  // Affine kinds let the simulator precompute per-step tables.
  [[nodiscard]] bool is_affine() const { return kind_ != Kind::kSemigroup; }
  // u(t, x) = G x + b for affine kinds.
  void affine_at(double t, SymMat* g, Vec* b) const;
  // True when evaluating at time t clamps the look-ahead 1-t to s_min.
  [[nodiscard]] bool clamps_at(double t) const;
  [[nodiscard]] double s_min() const { return s_min_; }

 private:
  DriftPolicy() = default;

  Kind kind_ = Kind::kZero;
  int dim_ = 0;
  SymMat q_;
  Vec a_;
  std::shared_ptr<const Potential> phi_;
  std::shared_ptr<const QuadratureRule> rule_;
  double s_min_ = 1e-3;
  std::string label_;
};

// The drift attaining the variational formula for log E e^{phi(B_1)}:
// closed form when the potential is quadratic-part-only, semigroup
// quadrature otherwise.
DriftPolicy follmer_drift(const Potential& phi, const QuadratureRule& rule, double s_min = 1e-3);
DriftPolicy follmer_drift(const Potential& phi);

}  // namespace santalo
