#include "santalo/potential.hpp"

#include <cmath>
#include <memory>

#include "doctest.h"
#include "santalo/errors.hpp"
#include "santalo/grid.hpp"
#include "santalo/polygon.hpp"

using namespace santalo;

namespace {

// central finite difference against the analytic gradient
void check_gradient(const Potential& phi, const Vec& x, double tol = 1e-6) {
  Vec g = phi.gradient(x);
  double h = 1e-6;
  for (int i = 0; i < phi.dim(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    double fd = (phi.value(xp) - phi.value(xm)) / (2 * h);
    CHECK(g[i] == doctest::Approx(fd).epsilon(tol).scale(1.0));
  }
}

}  // namespace

TEST_CASE("constant, linear, quadratic values and gradients") {
  Potential c = Potential::constant(2, 0.7);
  CHECK(c.kind() == Potential::Kind::kConstant);
  CHECK(c.value(Vec{1.0, -1.0}) == 0.7);
  CHECK(c.is_even());
  CHECK(c.gradient(Vec{1.0, -1.0}).norm() == 0.0);

  Potential l = Potential::linear(Vec{2.0, -1.0}, 0.5);
  CHECK(l.kind() == Potential::Kind::kLinear);
  CHECK(l.value(Vec{1.0, 1.0}) == doctest::Approx(1.5));
  CHECK(!l.is_even());
  check_gradient(l, Vec{0.3, -0.2});

  SymMat q(2);
  q.set(0, 0, 2.0);
  q.set(0, 1, 0.5);
  q.set(1, 1, 1.0);
  Potential quad = Potential::quadratic(q, Vec{1.0, 0.0}, -0.25);
  CHECK(quad.kind() == Potential::Kind::kQuadratic);
  // -x'Qx/2 + a.x + c at (1,1): Q-quad = 2 + 2*0.5 + 1 = 4 -> -2 + 1 - 0.25
  CHECK(quad.value(Vec{1.0, 1.0}) == doctest::Approx(-1.25));
  check_gradient(quad, Vec{0.7, -1.1});
  CHECK(!quad.is_even());  // linear part breaks evenness

  Potential iso = Potential::isotropic_quadratic(1, 1.0);
  CHECK(iso.value(Vec{2.0}) == doctest::Approx(-2.0));
  CHECK(iso.is_even());
  CHECK(iso.is_pure_quadratic());
}

TEST_CASE("radial power") {
  Potential r = Potential::radial_power(2, 4.0, 0.25);
  CHECK(r.kind() == Potential::Kind::kRadialPower);
  CHECK(r.value(Vec{1.0, 1.0}) == doctest::Approx(-0.25 * 4.0));  // |x|^4 = 4
  CHECK(r.is_even());
  CHECK(r.has_gradient());
  check_gradient(r, Vec{0.5, -0.8});
  // gradient of |x|^p at the center vanishes for p > 1
  CHECK(r.gradient(Vec{0.0, 0.0}).norm() == 0.0);
  CHECK(!r.is_pure_quadratic());
}

TEST_CASE("gauge power") {
  auto body = std::make_shared<ConvexPolygon>(ConvexPolygon::square());
  Potential g = Potential::gauge_power(body, 2.0, 0.5);
  CHECK(g.kind() == Potential::Kind::kGaugePower);
  CHECK(g.dim() == 2);
  CHECK(g.value(Vec{0.5, 0.25}) == doctest::Approx(-0.125));  // -(0.5)^2/2
  CHECK(g.is_even());
  CHECK(g.has_gradient());
  check_gradient(g, Vec{0.6, 0.2});  // smooth point (single active edge)
}

TEST_CASE("grid-backed potential") {
  Axis ax{-4.0, 4.0, 257};
  GridFunction grid = GridFunction::sample1([](double x) { return -x * x; }, ax,
                                            OutsideValue::kNegInfinity);
  Potential g = Potential::grid_backed(grid);
  CHECK(g.kind() == Potential::Kind::kGridBacked);
  CHECK(g.value(Vec{1.0}) == doctest::Approx(-1.0));
  CHECK(g.value(Vec{9.0}) == -std::numeric_limits<double>::infinity());
  CHECK(!g.has_gradient());
  CHECK_THROWS_AS((void)g.gradient(Vec{1.0}), GradientError);
  CHECK(g.is_even());
}

TEST_CASE("plus_half_square bridges densities and tilts") {
  Potential logf = Potential::isotropic_quadratic(1, 1.0);  // log f = -x^2/2
  Potential tilt = logf.plus_half_square();
  // phi = logf + x^2/2 = 0
  CHECK(tilt.value(Vec{1.7}) == doctest::Approx(0.0));
  Potential back = tilt.minus_half_square();
  CHECK(back.value(Vec{1.7}) == doctest::Approx(logf.value(Vec{1.7})));

  Potential t2 = santalo_to_tau(logf);
  CHECK(t2.value(Vec{-0.4}) == doctest::Approx(0.0));
  Potential b2 = tau_to_santalo(t2);
  CHECK(b2.value(Vec{0.9}) == doctest::Approx(logf.value(Vec{0.9})));

  // non-quadratic kinds carry the bridge in the quadratic part
  Potential quart = Potential::radial_power(1, 4.0, 0.25);
  Potential qt = santalo_to_tau(quart);
  CHECK(qt.value(Vec{1.5}) == doctest::Approx(quart.value(Vec{1.5}) + 0.5 * 1.5 * 1.5));
}

TEST_CASE("shifted_density moves the density exactly") {
  // X ~ e^phi dgamma with phi = a x: mean a; the shifted potential must be
  // the exact potential of X - b against gamma.
  Potential phi = Potential::linear(Vec{1.0});
  Vec b{1.0};
  Potential shifted = phi.shifted_density(b);
  // density of X - b: proportional to e^{phi(y+b)} gamma(y+b)
  //   = e^{phi(y+b) - |y+b|^2/2 + |y|^2/2} gamma(y)
  for (double y : {-1.0, 0.0, 0.3, 2.0}) {
    double expect = phi.value(Vec{y + 1.0}) - 0.5 * (y + 1) * (y + 1) + 0.5 * y * y;
    CHECK(shifted.value(Vec{y}) == doctest::Approx(expect + 0.0).epsilon(1e-12));
  }

  // shifting a radial extra moves its center
  Potential quart = Potential::radial_power(1, 4.0, 0.25);
  Potential sq = quart.shifted_density(Vec{0.5});
  CHECK(sq.radial_term() != nullptr);
  for (double y : {-0.7, 0.1, 1.3}) {
    double expect = quart.value(Vec{y + 0.5}) - 0.5 * (y + 0.5) * (y + 0.5) + 0.5 * y * y;
    CHECK(sq.value(Vec{y}) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(!sq.is_even());
}

TEST_CASE("plus_constant and labels") {
  Potential p = Potential::isotropic_quadratic(1, 2.0).plus_constant(3.0);
  CHECK(p.value(Vec{0.0}) == 3.0);
  Potential named = p.with_label("my-potential");
  CHECK(named.label() == "my-potential");
  CHECK(p.label().empty());
}

TEST_CASE("dimension checks") {
  Potential p = Potential::isotropic_quadratic(2, 1.0);
  CHECK_THROWS_AS((void)p.value(Vec{1.0}), DimensionError);
  CHECK_THROWS_AS((void)p.gradient(Vec{1.0, 2.0, 3.0}), DimensionError);
}
