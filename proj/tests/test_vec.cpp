#include "santalo/vec.hpp"

#include <cmath>

#include "doctest.h"
#include "santalo/errors.hpp"

using namespace santalo;

TEST_CASE("Vec construction and arithmetic") {
  Vec a{1.0, 2.0, 3.0};
  CHECK(a.dim() == 3);
  CHECK(a[0] == 1.0);
  CHECK(a[2] == 3.0);

  Vec z = Vec::zero(3);
  CHECK(z.norm() == 0.0);
  Vec e1 = Vec::unit(3, 1);
  CHECK(e1[1] == 1.0);
  CHECK(e1[0] == 0.0);

  Vec b{0.5, -1.0, 2.0};
  Vec s = a + b;
  CHECK(s[0] == doctest::Approx(1.5));
  CHECK(s[1] == doctest::Approx(1.0));
  Vec d = a - b;
  CHECK(d[1] == doctest::Approx(3.0));
  Vec sc = 2.0 * a;
  CHECK(sc[2] == doctest::Approx(6.0));
  CHECK((-a)[0] == -1.0);

  CHECK(a.dot(b) == doctest::Approx(0.5 - 2.0 + 6.0));
  CHECK(a.norm2() == doctest::Approx(14.0));
  CHECK(a.norm() == doctest::Approx(std::sqrt(14.0)));
  CHECK(a.all_finite());
  Vec bad{1.0, std::nan("")};
  CHECK(!bad.all_finite());
  CHECK(a.str().size() > 2);
}

TEST_CASE("Vec dimension errors") {
  Vec a{1.0, 2.0};
  Vec b{1.0, 2.0, 3.0};
  CHECK_THROWS_AS((void)a.dot(b), DimensionError);
  CHECK_THROWS_AS(a += b, DimensionError);
  CHECK_THROWS_AS(Vec(kMaxDim + 1), DimensionError);
}

TEST_CASE("SymMat basics") {
  SymMat m(2);
  m.set(0, 0, 2.0);
  m.set(0, 1, 0.5);
  m.set(1, 1, 1.0);
  CHECK(m(1, 0) == 0.5);  // set keeps both triangles in sync

  Vec x{1.0, 2.0};
  Vec y = m.apply(x);
  CHECK(y[0] == doctest::Approx(3.0));
  CHECK(y[1] == doctest::Approx(2.5));
  CHECK(m.quad(x) == doctest::Approx(x.dot(y)));

  SymMat id = SymMat::identity(2);
  CHECK(id(0, 0) == 1.0);
  CHECK(id(0, 1) == 0.0);
  CHECK(!id.is_zero());
  CHECK(SymMat(2).is_zero());

  SymMat iso = SymMat::isotropic(3, 2.5);
  CHECK(iso(2, 2) == 2.5);
  SymMat dg = SymMat::diag(Vec{1.0, 4.0});
  CHECK(dg(1, 1) == 4.0);

  SymMat shifted = m.plus_scaled_identity(1.0);
  CHECK(shifted(0, 0) == 3.0);
  CHECK(shifted(0, 1) == 0.5);
  SymMat sc = m.scaled(2.0);
  CHECK(sc(0, 1) == 1.0);
  SymMat sum = m.plus(id);
  CHECK(sum(1, 1) == 2.0);
}

TEST_CASE("SymMat cholesky, solve, inverse, log_det") {
  SymMat m(2);
  m.set(0, 0, 4.0);
  m.set(0, 1, 1.0);
  m.set(1, 1, 3.0);
  // det = 11, PD
  CHECK(m.is_positive_definite());
  SymMat l;
  CHECK(m.cholesky(&l));
  // L L^T = M
  CHECK(l(0, 0) * l(0, 0) == doctest::Approx(4.0));

  Vec b{1.0, 2.0};
  Vec x = m.solve(b);
  Vec back = m.apply(x);
  CHECK(back[0] == doctest::Approx(1.0));
  CHECK(back[1] == doctest::Approx(2.0));

  SymMat inv = m.inverse();
  // M * M^{-1} = I
  Vec c0 = m.apply(Vec{inv(0, 0), inv(1, 0)});
  CHECK(c0[0] == doctest::Approx(1.0));
  CHECK(c0[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.log_det() == doctest::Approx(std::log(11.0)));

  SymMat neg(2);
  neg.set(0, 0, -1.0);
  neg.set(1, 1, 1.0);
  CHECK(!neg.is_positive_definite());
  CHECK_THROWS_AS((void)neg.log_det(), Error);
  CHECK_THROWS_AS((void)neg.solve(b), Error);

  // floor: 0.5 I is PD but not PD - 0.6 I
  SymMat half = SymMat::isotropic(2, 0.5);
  CHECK(half.is_positive_definite(0.4));
  CHECK(!half.is_positive_definite(0.6));
}
