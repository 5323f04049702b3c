#pragma once

#include <string>
#include <vector>

#include "santalo/polygon.hpp"
#include "santalo/potential.hpp"
#include "santalo/quadrature.hpp"

namespace santalo {

// Tolerances the suite certifies against. Saturating cases are exact up to
// round-off (closed-form partners/polars), hence the tight bounds.
inline constexpr double kTauTol = 1e-8;          // product <= 1 + kTauTol
inline constexpr double kSantaloRelTol = 1e-8;   // product <= bound (1 + tol)
inline constexpr double kBodyTol = 1e-9;         // volume product <= pi^2 + tol
inline constexpr double kCenterTol = 1e-8;       // |barycenter| for "centered"

// integral of e^phi against gamma_n, routed by smoothness: Hermite rule for
// entire integrands, direct Lebesgue box quadrature for kinked ones (gauge
// powers, fractional radial powers, grids).
double gamma_integral(const Potential& phi, const QuadratureRule& rule);
bool hermite_friendly(const Potential& phi);

struct TauCheck {
  std::string id;
  double c = 0.0;
  double product = 0.0;
  double bound = 1.0;
  double margin = 0.0;           // bound - product
  bool pass = false;
  bool centering_required = false;  // c > 1/4
  bool centered = false;
  bool flagged = false;          // expected violation: uncentered at c > 1/4
};

enum class CenteringPolicy { kEnforce, kFlagOnly };

// Product (int e^phi dgamma)(int e^psi dgamma) with psi the Moreau partner
// at cost c. c <= 1/4 holds unconditionally; c = 1/2 needs a centered
// density, and kEnforce turns an uncentered input into a CenteringError.
TauCheck tau_product(const Potential& phi, double c, const QuadratureRule& rule,
                     CenteringPolicy policy = CenteringPolicy::kEnforce);

struct SharpnessPoint {
  double a = 0.0;
  double c = 0.0;
  double product = 0.0;
  double predicted = 0.0;  // exp(a^2 (1 - 1/(4c))) for the linear family
};

// Linear family phi = a x: the tau product crosses 1 exactly at c = 1/4.
std::vector<SharpnessPoint> sharpness_scan(const std::vector<double>& a_values,
                                           const std::vector<double>& c_values,
                                           const QuadratureRule& rule);

struct SantaloCheck {
  std::string id;
  int dim = 0;
  double f_integral = 0.0;
  double g_integral = 0.0;
  double product = 0.0;
  double bound = 0.0;  // (2pi)^n
  double gap = 0.0;    // bound - product
  bool pass = false;
};

// Functional volume-product check: f = e^logf (centered), g its polar
// density; int f * int g <= (2pi)^n with equality iff f is Gaussian.
SantaloCheck santalo_product(const Potential& logf, const QuadratureRule& rule);

struct BodyCheck {
  std::string id;
  double area = 0.0;
  double polar_area = 0.0;
  double product = 0.0;
  double bound = 0.0;        // pi^2
  bool symmetric = false;    // bound is only claimed for symmetric bodies
  bool pass = false;
  double gauge_integral = 0.0;  // int e^{-gauge^2/2} dx
  double gauge_expected = 0.0;  // 2 area(K)
  double gauge_rel_err = 0.0;
};

// Geometric counterpart: area(K) area(K°) <= pi^2, plus the layer-cake
// identity linking the gauge density to the area.
BodyCheck body_check(const ConvexPolygon& body, const std::string& id);

}  // namespace santalo
