#include "santalo/inequalities.hpp"

#include <cmath>

#include "santalo/transforms.hpp"

namespace santalo {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double pow_two_pi_half(int dim) { return std::pow(kTwoPi, 0.5 * dim); }

bool is_even_integer(double p) {
  double r = std::round(p);
  return std::abs(p - r) < 1e-12 && std::fmod(r, 2.0) == 0.0;
}

}  // namespace

bool hermite_friendly(const Potential& phi) {
  if (phi.is_pure_quadratic()) return true;
  if (const auto* r = phi.radial_term())
    return is_even_integer(r->power);  // |x-s|^p entire only for even p
  return false;  // gauge kinks, grid interpolation corners
}

double gamma_integral(const Potential& phi, const QuadratureRule& rule) {
  if (hermite_friendly(phi)) return integrate_exp(phi, rule);
  // int e^phi dgamma = (2pi)^{-n/2} int e^{phi - |x|^2/2} dx
  return integrate_exp_lebesgue(tau_to_santalo(phi)) / pow_two_pi_half(phi.dim());
}

TauCheck tau_product(const Potential& phi, double c, const QuadratureRule& rule,
                     CenteringPolicy policy) {
  TauCheck out;
  out.id = phi.label();
  out.c = c;
  out.centering_required = c > 0.25 + 1e-12;
  if (out.centering_required) {
    Vec b = barycenter(phi, rule);
    out.centered = b.norm() <= kCenterTol;
    if (!out.centered) {
      if (policy == CenteringPolicy::kEnforce)
        throw CenteringError("tau_product: c = " + std::to_string(c) +
                             " > 1/4 requires a centered density; barycenter is " + b.str());
      out.flagged = true;
    }
  } else {
    out.centered = true;
  }
  Potential psi = moreau_partner(phi, c);
  double fi = gamma_integral(phi, rule);
  double gi = gamma_integral(psi, rule);
  out.product = fi * gi;
  out.margin = out.bound - out.product;
  out.pass = out.flagged || out.product <= out.bound + kTauTol;
  return out;
}

std::vector<SharpnessPoint> sharpness_scan(const std::vector<double>& a_values,
                                           const std::vector<double>& c_values,
                                           const QuadratureRule& rule) {
  std::vector<SharpnessPoint> pts;
  pts.reserve(a_values.size() * c_values.size());
  for (double a : a_values) {
    Potential phi = Potential::linear(Vec{a});
    for (double c : c_values) {
      TauCheck t = tau_product(phi, c, rule, CenteringPolicy::kFlagOnly);
      SharpnessPoint p;
      p.a = a;
      p.c = c;
      p.product = t.product;
      p.predicted = std::exp(a * a * (1.0 - 1.0 / (4.0 * c)));
      pts.push_back(p);
    }
  }
  return pts;
}

SantaloCheck santalo_product(const Potential& logf, const QuadratureRule& rule) {
  SantaloCheck out;
  out.id = logf.label();
  out.dim = logf.dim();
  out.bound = std::pow(kTwoPi, logf.dim());

  // The (2pi)^n bound needs the density f centered (Lebesgue barycenter;
  // same as the barycenter of the bridged Gaussian tilt).
  if (!logf.is_even()) {
    Vec b = barycenter(santalo_to_tau(logf), rule);
    if (b.norm() > kCenterTol)
      throw CenteringError("santalo_product: density must be centered; barycenter is " +
                           b.str());
  }

  auto lebesgue_integral = [&](const Potential& log_density) {
    if (hermite_friendly(log_density))
      return pow_two_pi_half(log_density.dim()) *
             integrate_exp(santalo_to_tau(log_density), rule);
    return integrate_exp_lebesgue(log_density);
  };

  out.f_integral = lebesgue_integral(logf);
  Potential logg = polar_function(logf);
  out.g_integral = lebesgue_integral(logg);
  out.product = out.f_integral * out.g_integral;
  out.gap = out.bound - out.product;
  out.pass = out.product <= out.bound * (1.0 + kSantaloRelTol);
  return out;
}

BodyCheck body_check(const ConvexPolygon& body, const std::string& id) {
  BodyCheck out;
  out.id = id;
  out.area = body.area();
  ConvexPolygon polar = body.polar();
  out.polar_area = polar.area();
  out.product = out.area * out.polar_area;
  out.bound = M_PI * M_PI;
  out.symmetric = body.is_origin_symmetric();
  out.pass = !out.symmetric || out.product <= out.bound + kBodyTol;

  // Layer cake: int e^{-gauge^2/2} dx = 2 area(K).
  auto shared = std::make_shared<ConvexPolygon>(body);
  Potential logf = Potential::gauge_power(shared, 2.0, 0.5);
  out.gauge_integral = integrate_exp_lebesgue(logf);
  out.gauge_expected = 2.0 * out.area;
  out.gauge_rel_err = std::abs(out.gauge_integral - out.gauge_expected) / out.gauge_expected;
  return out;
}

}  // namespace santalo
