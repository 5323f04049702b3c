#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "doctest.h"
#include "santalo/errors.hpp"
#include "santalo/grid.hpp"
#include "santalo/polygon.hpp"
#include "santalo/potential.hpp"
#include "santalo/transforms.hpp"
#include "santalo/vec.hpp"

using namespace santalo;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool close(double a, double b, double tol) {
  if (a == b) return true;  // covers matching infinities
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("moreau partner of a gaussian tilt has the closed-form coefficients") {
  // phi = -x^2/2: partner at c = 1/4 is +y^2/6, at c = 1/2 it is +y^2/4.
  Potential phi = Potential::isotropic_quadratic(1, 1.0);

  Potential p14 = moreau_partner(phi, 0.25);
  REQUIRE(p14.is_pure_quadratic());
  CHECK(p14.quad_part().q(0, 0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(p14.quad_part().a[0]) < 1e-15);
  CHECK(std::abs(p14.quad_part().c) < 1e-15);

  Potential p12 = moreau_partner(phi, 0.5);
  CHECK(p12.quad_part().q(0, 0) == doctest::Approx(-0.5).epsilon(1e-12));

  // Defining inequality, with equality along the optimal pairing x = y/3.
  for (double y : {-2.0, -0.5, 0.0, 1.5, 3.0}) {
    for (double x : {-2.5, -1.0, 0.0, 0.7, 2.0}) {
      CHECK(phi.value(Vec{x}) + p14.value(Vec{y}) <= 0.25 * (x - y) * (x - y) + 1e-9);
    }
    double xs = y / 3.0;
    CHECK(phi.value(Vec{xs}) + p14.value(Vec{y}) ==
          doctest::Approx(0.25 * (xs - y) * (xs - y)).epsilon(1e-12));
  }
}

TEST_CASE("moreau partner of a linear potential") {
  // phi(x) = a x: psi(y) = -a y - a^2/(4c).
  const double c = 0.3;
  Potential psi = moreau_partner(Potential::linear(Vec{1.0}), c);
  REQUIRE(psi.is_pure_quadratic());
  CHECK(std::abs(psi.quad_part().q(0, 0)) < 1e-14);
  CHECK(psi.quad_part().a[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(psi.quad_part().c == doctest::Approx(-1.0 / (4.0 * c)).epsilon(1e-12));
  CHECK(psi.value(Vec{0.7}) == doctest::Approx(-0.7 - 1.0 / 1.2).epsilon(1e-12));
}

TEST_CASE("moreau partner is an involution on semiconcave quadratics") {
  SymMat q1 = SymMat::isotropic(1, 1.0);
  Potential f1 = Potential::quadratic(q1, Vec{0.7}, 0.2);
  Potential g1 = moreau_partner(moreau_partner(f1, 0.5), 0.5);
  CHECK(g1.quad_part().q(0, 0) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(g1.quad_part().a[0] == doctest::Approx(0.7).epsilon(1e-11));
  CHECK(g1.quad_part().c == doctest::Approx(0.2).epsilon(1e-11));

  SymMat q2(2);
  q2.set(0, 0, 1.2);
  q2.set(1, 1, 0.8);
  q2.set(0, 1, 0.3);
  Potential f2 = Potential::quadratic(q2, Vec{0.1, -0.4}, -0.05);
  Potential g2 = moreau_partner(moreau_partner(f2, 0.4), 0.4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(g2.quad_part().q(i, j) == doctest::Approx(q2(i, j)).epsilon(1e-11));
  CHECK(g2.quad_part().a[0] == doctest::Approx(0.1).epsilon(1e-11));
  CHECK(g2.quad_part().a[1] == doctest::Approx(-0.4).epsilon(1e-11));
  CHECK(g2.quad_part().c == doctest::Approx(-0.05).epsilon(1e-10));
}

TEST_CASE("moreau partner rejects inputs that are not c-semiconcave") {
  // phi = +0.3 x^2: Q + 2cI = -0.6 + 0.5 < 0, the infimum is -inf.
  CHECK_THROWS_AS(moreau_partner(Potential::isotropic_quadratic(1, -0.6), 0.25),
                  IntegrabilityError);
  CHECK_THROWS_AS(moreau_partner(Potential::isotropic_quadratic(1, 1.0), 0.0), ConfigError);
  CHECK_THROWS_AS(moreau_partner(Potential::isotropic_quadratic(1, 1.0), -0.25), ConfigError);
}

TEST_CASE("grid moreau partner equals the brute-force minimum over samples") {
  const double c = 0.25;
  Potential quartic = Potential::radial_power(1, 4.0, 0.25);
  Potential psi = moreau_partner(quartic, c);  // grid route

  Axis ax;  // the route samples on the default box
  for (int j : {256, 768, 1024, 1500, 1900}) {
    double y = ax.coord(j);
    double best = kInf;
    for (int i = 0; i < ax.count; ++i) {
      double x = ax.coord(i);
      best = std::min(best, c * (x - y) * (x - y) - quartic.value(Vec{x}));
    }
    CHECK(close(psi.value(Vec{y}), best, 1e-9));
  }
}

TEST_CASE("fast grid moreau partner matches the serial reference") {
  const double c = 0.25;
  Axis ax;
  GridFunction phi = GridFunction::sample1([](double x) { return -0.25 * x * x * x * x; }, ax,
                                           OutsideValue::kNegInfinity);
  GridFunction fast = moreau_partner_grid(phi, c);
  GridFunction slow = ref::moreau_partner_grid(phi, c);
  for (int i = 0; i < ax.count; ++i) CHECK(close(fast.node(i), slow.node(i), 1e-12));

  Axis small{-4.0, 4.0, 129};
  GridFunction phi2 = GridFunction::sample2(
      [](double x, double y) { return -0.25 * (x * x * x * x + y * y * y * y); }, small, small,
      OutsideValue::kNegInfinity);
  GridFunction fast2 = moreau_partner_grid(phi2, 0.5);
  GridFunction slow2 = ref::moreau_partner_grid(phi2, 0.5);
  for (int i = 0; i < small.count; ++i)
    for (int j = 0; j < small.count; ++j) CHECK(close(fast2.node(i, j), slow2.node(i, j), 1e-12));
}

TEST_CASE("grid moreau partner rejects a potential with no mass") {
  Axis ax{-2.0, 2.0, 65};
  GridFunction empty(ax, OutsideValue::kNegInfinity);
  for (int i = 0; i < ax.count; ++i) empty.node(i) = -kInf;
  CHECK_THROWS_AS(moreau_partner_grid(empty, 0.25), IntegrabilityError);

  GridFunction empty2(ax, ax, OutsideValue::kNegInfinity);
  for (int i = 0; i < ax.count; ++i)
    for (int j = 0; j < ax.count; ++j) empty2.node(i, j) = -kInf;
  CHECK_THROWS_AS(moreau_partner_grid(empty2, 0.25), IntegrabilityError);
}

TEST_CASE("legendre conjugate of x^2/2 is y^2/2 at the nodes") {
  Axis ax;
  GridFunction f = GridFunction::sample1([](double x) { return 0.5 * x * x; }, ax,
                                         OutsideValue::kPosInfinity);
  GridFunction g = legendre_conjugate(f);
  for (int j = 0; j < ax.count; j += 64) {
    double y = ax.coord(j);
    CHECK(close(g.node(j), 0.5 * y * y, 1e-12));
  }
}

TEST_CASE("legendre biconjugate restores a convex sample where slopes stay in the box") {
  Axis ax;
  GridFunction f = GridFunction::sample1(
      [](double x) { return 0.25 * x * x * x * x + 0.3 * x; }, ax, OutsideValue::kPosInfinity);
  GridFunction ff = legendre_conjugate(legendre_conjugate(f));
  for (int i = 0; i < ax.count; ++i) {
    double x = ax.coord(i);
    // Biconjugate never exceeds the sample.
    CHECK(ff.node(i) <= f.node(i) + 1e-9);
    // Where the supporting slope x^3 + 0.3 lies inside the conjugate box the
    // sample is recovered up to the sag of the node-sampled conjugate; the
    // worst case is near the flat spot (slope 0.3), where the conjugate has
    // unbounded curvature and the deficit scales like h^(4/3).
    if (std::abs(x * x * x + 0.3) < 7.5) CHECK(close(ff.node(i), f.node(i), 1e-3));
  }
}

TEST_CASE("fast legendre conjugate matches the serial reference") {
  Axis ax{-8.0, 8.0, 257};
  GridFunction f = GridFunction::sample1(
      [](double x) { return 0.25 * x * x * x * x + 0.3 * x; }, ax, OutsideValue::kPosInfinity);
  f.node(100) = kInf;  // absent sample
  GridFunction fast = legendre_conjugate(f, ax);
  GridFunction slow = ref::legendre_conjugate(f, ax);
  for (int i = 0; i < ax.count; ++i) CHECK(close(fast.node(i), slow.node(i), 1e-12));
}

TEST_CASE("legendre conjugate rejects -inf samples") {
  Axis ax{-2.0, 2.0, 65};
  GridFunction f = GridFunction::sample1([](double x) { return 0.5 * x * x; }, ax,
                                         OutsideValue::kPosInfinity);
  f.node(3) = -kInf;
  CHECK_THROWS_AS(legendre_conjugate(f), IntegrabilityError);
}

TEST_CASE("polar of a centered gaussian inverts the covariance") {
  Potential g = Potential::isotropic_quadratic(1, 2.0);
  Potential p = polar_function(g);
  REQUIRE(p.is_pure_quadratic());
  CHECK(p.quad_part().q(0, 0) == doctest::Approx(0.5).epsilon(1e-14));

  // Normalization constants flip sign.
  Potential gc = Potential::isotropic_quadratic(1, 1.0).plus_constant(0.3);
  CHECK(polar_function(gc).quad_part().c == doctest::Approx(-0.3).epsilon(1e-14));

  CHECK_THROWS_AS(polar_function(Potential::isotropic_quadratic(1, -1.0)), IntegrabilityError);
  CHECK_THROWS_AS(polar_function(Potential::constant(1, 0.0)), IntegrabilityError);
}

TEST_CASE("polar of a radial power conjugates the profile") {
  // log f = -|x|^4/4: log f polar = -(3/4)|y|^{4/3}.
  Potential f = Potential::radial_power(1, 4.0, 0.25);
  Potential p = polar_function(f);
  const auto* rt = p.radial_term();
  REQUIRE(rt != nullptr);
  CHECK(rt->power == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(rt->coeff == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(p.value(Vec{2.0}) == doctest::Approx(-0.75 * std::pow(2.0, 4.0 / 3.0)).epsilon(1e-13));

  // p = 2, coeff = 1/2 is the standard gaussian; the profile is self-polar.
  Potential g = polar_function(Potential::radial_power(2, 2.0, 0.5));
  const auto* gt = g.radial_term();
  REQUIRE(gt != nullptr);
  CHECK(gt->power == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(gt->coeff == doctest::Approx(0.5).epsilon(1e-14));

  // Defining pairing: f(x) f_polar(y) <= e^{-x.y}.
  for (double x : {-2.0, -0.7, 0.0, 1.1, 2.5})
    for (double y : {-2.0, -0.7, 0.0, 1.1, 2.5})
      CHECK(f.value(Vec{x}) + p.value(Vec{y}) + x * y <= 1e-12);
}

TEST_CASE("polar of a gauge power swaps the body for its polar") {
  auto square = std::make_shared<const ConvexPolygon>(ConvexPolygon::square(1.0));
  Potential f = Potential::gauge_power(square, 2.0, 0.5);
  Potential p = polar_function(f);
  const auto* gt = p.gauge_term();
  REQUIRE(gt != nullptr);
  CHECK(gt->power == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(gt->coeff == doctest::Approx(0.5).epsilon(1e-14));
  // Polar of the sup-norm ball is the l1 ball: gauge(0.3, 0.4) = 0.7.
  CHECK(p.value(Vec{0.3, 0.4}) == doctest::Approx(-0.5 * 0.49).epsilon(1e-13));
}

TEST_CASE("grid fallback polar agrees with the gaussian closed form") {
  Axis ax;
  Potential grid_gauss = Potential::grid_backed(GridFunction::sample1(
      [](double x) { return -0.5 * x * x; }, ax, OutsideValue::kNegInfinity));
  Potential p = polar_function(grid_gauss);
  for (double y : {0.0, 0.5, -0.5, 1.2, -1.2}) {
    CHECK(std::abs(p.value(Vec{y}) - (-0.5 * y * y)) < 1e-4);
  }

  Potential grid_gauss2 = Potential::grid_backed(GridFunction::sample2(
      [](double x, double y) { return -0.5 * (x * x + y * y); }, ax, ax,
      OutsideValue::kNegInfinity));
  Potential p2 = polar_function(grid_gauss2);
  CHECK(std::abs(p2.value(Vec{0.3, -0.7}) - (-0.5 * 0.58)) < 1e-4);
}
