#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <initializer_list>
#include <string>

#include "santalo/errors.hpp"

namespace santalo {

inline constexpr int kMaxDim = 10;

// Point in R^n for n <= kMaxDim. Value type, no heap; the dimension is fixed
// at construction and checked on every binary operation.
class Vec {
 public:
  Vec() : n_(0) { v_.fill(0.0); }

  explicit Vec(int n) : n_(n) {
    check_dim(n);
    v_.fill(0.0);
  }

  Vec(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())) {
    check_dim(n_);
    v_.fill(0.0);
    int i = 0;
    for (double x : xs) v_[i++] = x;
  }

  static Vec zero(int n) { return Vec(n); }

  static Vec unit(int n, int axis) {
    Vec e(n);
    assert(axis >= 0 && axis < n);
    e.v_[axis] = 1.0;
    return e;
  }

  [[nodiscard]] int dim() const { return n_; }

  double& operator[](int i) {
    assert(i >= 0 && i < n_);
    return v_[i];
  }
  double operator[](int i) const {
    assert(i >= 0 && i < n_);
    return v_[i];
  }

  Vec& operator+=(const Vec& o) {
    same_dim(o);
    for (int i = 0; i < n_; ++i) v_[i] += o.v_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    same_dim(o);
    for (int i = 0; i < n_; ++i) v_[i] -= o.v_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < n_; ++i) v_[i] *= s;
    return *this;
  }

  [[nodiscard]] double dot(const Vec& o) const {
    same_dim(o);
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += v_[i] * o.v_[i];
    return s;
  }

  [[nodiscard]] double norm2() const { return dot(*this); }
  [[nodiscard]] double norm() const { return std::sqrt(norm2()); }

  [[nodiscard]] bool all_finite() const {
    for (int i = 0; i < n_; ++i)
      if (!std::isfinite(v_[i])) return false;
    return true;
  }

  [[nodiscard]] std::string str() const {
    std::string s = "(";
    for (int i = 0; i < n_; ++i) {
      if (i) s += ", ";
      s += std::to_string(v_[i]);
    }
    return s + ")";
  }

 private:
  static void check_dim(int n) {
    if (n < 0 || n > kMaxDim) throw DimensionError("Vec dimension out of range");
  }
  void same_dim(const Vec& o) const {
    if (n_ != o.n_) throw DimensionError("Vec dimension mismatch");
  }

  int n_;
  std::array<double, kMaxDim> v_;
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(double s, Vec a) { return a *= s; }
inline Vec operator*(Vec a, double s) { return a *= s; }
inline Vec operator-(Vec a) { return a *= -1.0; }

// Symmetric n x n matrix, n <= kMaxDim. Stores the full square; set() keeps
// the two triangles in sync. Factorizations are plain Cholesky: every matrix
// the library inverts is positive definite by construction, and callers that
// cannot guarantee that probe with is_positive_definite() first.
class SymMat {
 public:
  SymMat() : n_(0) { a_.fill(0.0); }

  explicit SymMat(int n) : n_(n) {
    if (n < 0 || n > kMaxDim) throw DimensionError("SymMat dimension out of range");
    a_.fill(0.0);
  }

  static SymMat identity(int n) {
    SymMat m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  static SymMat isotropic(int n, double lambda) {
    SymMat m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = lambda;
    return m;
  }

  static SymMat diag(const Vec& d) {
    SymMat m(d.dim());
    for (int i = 0; i < d.dim(); ++i) m.at(i, i) = d[i];
    return m;
  }

  [[nodiscard]] int dim() const { return n_; }

  double operator()(int i, int j) const {
    assert(i >= 0 && i < n_ && j >= 0 && j < n_);
    return a_[static_cast<std::size_t>(i) * kMaxDim + j];
  }

  void set(int i, int j, double v) {
    assert(i >= 0 && i < n_ && j >= 0 && j < n_);
    a_[static_cast<std::size_t>(i) * kMaxDim + j] = v;
    a_[static_cast<std::size_t>(j) * kMaxDim + i] = v;
  }

  [[nodiscard]] bool is_zero() const {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if ((*this)(i, j) != 0.0) return false;
    return true;
  }

  [[nodiscard]] Vec apply(const Vec& x) const {
    if (x.dim() != n_) throw DimensionError("SymMat/Vec dimension mismatch");
    Vec y(n_);
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  // x^T A x
  [[nodiscard]] double quad(const Vec& x) const { return x.dot(apply(x)); }

  [[nodiscard]] SymMat plus_scaled_identity(double s) const {
    SymMat m = *this;
    for (int i = 0; i < n_; ++i) m.at(i, i) += s;
    return m;
  }

  [[nodiscard]] SymMat scaled(double s) const {
    SymMat m = *this;
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) m.set(i, j, m(i, j) * s);
    return m;
  }

  [[nodiscard]] SymMat plus(const SymMat& o) const {
    if (o.n_ != n_) throw DimensionError("SymMat dimension mismatch");
    SymMat m = *this;
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) m.set(i, j, m(i, j) + o(i, j));
    return m;
  }

  // Lower-triangular Cholesky factor; false when the matrix is not positive
  // definite (to the working precision).
  bool cholesky(SymMat* lower) const {
    SymMat l(n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = (*this)(i, j);
        for (int k = 0; k < j; ++k) s -= l.raw(i, k) * l.raw(j, k);
        if (i == j) {
          if (!(s > 0.0)) return false;
          l.raw(i, i) = std::sqrt(s);
        } else {
          l.raw(i, j) = s / l.raw(j, j);
        }
      }
    }
    if (lower) *lower = l;
    return true;
  }

  [[nodiscard]] bool is_positive_definite(double floor = 0.0) const {
    return plus_scaled_identity(-floor).cholesky(nullptr);
  }

  [[nodiscard]] Vec solve(const Vec& b) const {
    SymMat l;
    if (!cholesky(&l)) throw Error("SymMat::solve: matrix not positive definite");
    if (b.dim() != n_) throw DimensionError("SymMat/Vec dimension mismatch");
    Vec y(n_);
    for (int i = 0; i < n_; ++i) {
      double s = b[i];
      for (int k = 0; k < i; ++k) s -= l.raw(i, k) * y[k];
      y[i] = s / l.raw(i, i);
    }
    Vec x(n_);
    for (int i = n_ - 1; i >= 0; --i) {
      double s = y[i];
      for (int k = i + 1; k < n_; ++k) s -= l.raw(k, i) * x[k];
      x[i] = s / l.raw(i, i);
    }
    return x;
  }

  [[nodiscard]] SymMat inverse() const {
    SymMat inv(n_);
    for (int j = 0; j < n_; ++j) {
      Vec col = solve(Vec::unit(n_, j));
      for (int i = 0; i < n_; ++i) inv.set(i, j, col[i]);
    }
    return inv;
  }

  [[nodiscard]] double log_det() const {
    SymMat l;
    if (!cholesky(&l)) throw Error("SymMat::log_det: matrix not positive definite");
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += std::log(l.raw(i, i));
    return 2.0 * s;
  }

 private:
  double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * kMaxDim + j]; }
  // raw() bypasses the symmetry sync; only used while building factors.
  double& raw(int i, int j) { return a_[static_cast<std::size_t>(i) * kMaxDim + j]; }
  double raw(int i, int j) const { return a_[static_cast<std::size_t>(i) * kMaxDim + j]; }

  int n_;
  std::array<double, kMaxDim * kMaxDim> a_;
};

}  // namespace santalo
