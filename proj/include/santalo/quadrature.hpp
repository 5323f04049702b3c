#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "santalo/potential.hpp"
#include "santalo/vec.hpp"

namespace santalo {

// Probabilists' Gauss-Hermite rule: nodes/weights for the weight
// e^{-x^2/2}/sqrt(2pi), weights summing to 1. Tensorized per axis at
// integration time; exact for polynomials of degree < 2m and geometrically
// convergent for entire integrands.
class QuadratureRule {
 public:
  static QuadratureRule gauss_hermite(int points_per_axis);
  // Pinned defaults: 128 (1D), 96 (2D), 48 (3D).
  static QuadratureRule default_for_dim(int dim);

  [[nodiscard]] int points_per_axis() const { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
  [[nodiscard]] const std::vector<double>& log_weights() const { return log_weights_; }

 private:
  QuadratureRule() = default;
  std::vector<double> nodes_, weights_, log_weights_;
};

// Textual rule reference used in configs: "gh:m=128" or
// "mc:N=1000000,seed=42".
struct RuleSpec {
  enum class Method { kGaussHermite, kMonteCarlo };
  Method method = Method::kGaussHermite;
  int points_per_axis = 0;    // gh
  std::int64_t samples = 0;   // mc
  std::uint64_t seed = 0;     // mc

  static RuleSpec parse(const std::string& text);
  [[nodiscard]] std::string str() const;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;   // 0 for deterministic quadrature
  std::int64_t samples = 0; // 0 for deterministic quadrature
  bool degenerate = false;  // MC run whose samples were all equal
};

// integral of e^phi against the standard Gaussian gamma_n. Throws
// IntegrabilityError when the value overflows, vanishes, or is not finite.
double integrate_exp(const Potential& phi, const QuadratureRule& rule);
double log_partition(const Potential& phi, const QuadratureRule& rule);
double integrate_exp(const Potential& phi);  // default rule for phi's dim
double log_partition(const Potential& phi);

// barycenter of the density e^phi dgamma / Z.
Vec barycenter(const Potential& phi, const QuadratureRule& rule);
Vec barycenter(const Potential& phi);

// Plain Monte Carlo for the same integral; any dimension up to kMaxDim.
Estimate mc_integrate_exp(const Potential& phi, std::int64_t samples, std::uint64_t seed);

// Dispatch on a parsed rule string.
Estimate integrate_exp(const Potential& phi, const RuleSpec& spec);

// Direct Lebesgue integral of e^logf over [-radius, radius]^n by tensor
// trapezoid. The workhorse for integrands with kinks (gauge powers,
// fractional radial powers), where Hermite quadrature stalls.
double integrate_exp_lebesgue(const Potential& logf, double radius, int points_per_axis);
// Chooses the box by probing where logf drops below the mass cutoff, and a
// per-dimension default resolution (8193 in 1D, 2049 in 2D).
double integrate_exp_lebesgue(const Potential& logf);

// Potential of the centered density (exact structural shift by the computed
// barycenter). Post: |barycenter| <= tol checked inside.
Potential recenter(const Potential& phi, const QuadratureRule& rule);

namespace ref {
// Serial reference implementations: naive accumulation in natural order.
double integrate_exp(const Potential& phi, const QuadratureRule& rule);
Estimate mc_integrate_exp(const Potential& phi, std::int64_t samples, std::uint64_t seed);
}  // namespace ref

}  // namespace santalo
