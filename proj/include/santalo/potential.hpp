#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "santalo/grid.hpp"
#include "santalo/polygon.hpp"
#include "santalo/vec.hpp"

namespace santalo {

// Potential phi on R^n, used both as the exponent of a tilted Gaussian
// density e^phi dgamma and as a log-density log f against Lebesgue measure.
//
// Representation: an always-present quadratic part
//     -x'Qx/2 + a.x + c
// plus at most one extra term (radial power, gauge power, or grid-backed).
// This is closed under the transforms the library needs  (+-|x|^2/2,
// recentering, Moreau partners of quadratics), which is what keeps the
// saturating Gaussian cases exact instead of drowning them in grid error.
class Potential {
 public:
  enum class Kind { kConstant, kLinear, kQuadratic, kRadialPower, kGaugePower, kGridBacked };

  struct QuadPart {
    SymMat q;
    Vec a;
    double c = 0.0;
  };
  // -coeff * |x - shift|^power, power >= 1
  struct RadialTerm {
    double power = 2.0;
    double coeff = 0.0;
    Vec shift;
  };
  // -coeff * gauge_K(x - shift)^power, power >= 1
  struct GaugeTerm {
    std::shared_ptr<const ConvexPolygon> body;
    double power = 2.0;
    double coeff = 0.0;
    Vec shift;
  };
  struct GridTerm {
    std::shared_ptr<const GridFunction> grid;
    Vec shift;
  };
  using Extra = std::variant<std::monostate, RadialTerm, GaugeTerm, GridTerm>;

  static Potential constant(int dim, double c);
  static Potential linear(Vec a, double c = 0.0);
  static Potential quadratic(SymMat q, Vec a, double c = 0.0);
  // -lambda |x|^2 / 2
  static Potential isotropic_quadratic(int dim, double lambda);
  static Potential radial_power(int dim, double power, double coeff);
  static Potential gauge_power(std::shared_ptr<const ConvexPolygon> body, double power,
                               double coeff);
  static Potential grid_backed(GridFunction grid);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] Kind kind() const;
  [[nodiscard]] bool is_pure_quadratic() const {
    return std::holds_alternative<std::monostate>(extra_);
  }

  [[nodiscard]] double value(const Vec& x) const;
  [[nodiscard]] Vec gradient(const Vec& x) const;
  [[nodiscard]] bool has_gradient() const;
  [[nodiscard]] bool is_even() const;

  // phi + c
  [[nodiscard]] Potential plus_constant(double c) const;
  // phi(x) +- |x|^2/2: the bridge between log-densities and Gaussian tilts.
  [[nodiscard]] Potential plus_half_square() const;
  [[nodiscard]] Potential minus_half_square() const;
  // Potential of the recentered density: if X ~ e^phi dgamma / Z has mean b,
  // the result is the potential of X - b (exact for every kind).
  [[nodiscard]] Potential shifted_density(const Vec& b) const;

  [[nodiscard]] const QuadPart& quad_part() const { return quad_; }
  [[nodiscard]] const Extra& extra() const { return extra_; }
  [[nodiscard]] const RadialTerm* radial_term() const { return std::get_if<RadialTerm>(&extra_); }
  [[nodiscard]] const GaugeTerm* gauge_term() const { return std::get_if<GaugeTerm>(&extra_); }
  [[nodiscard]] const GridTerm* grid_term() const { return std::get_if<GridTerm>(&extra_); }

  [[nodiscard]] const std::string& label() const { return label_; }
  [[nodiscard]] Potential with_label(std::string label) const;

 private:
  Potential(int dim, QuadPart quad, Extra extra);

  int dim_;
  QuadPart quad_;
  Extra extra_;
  std::string label_;
};

// Bridge between the Santalo normalization (log-densities f against dx) and
// Gaussian tilts: phi = logf + |x|^2/2, so that e^phi dgamma = f dx/(2pi)^{n/2}.
Potential santalo_to_tau(const Potential& logf);
Potential tau_to_santalo(const Potential& phi);

}  // namespace santalo
