#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "santalo/errors.hpp"
#include "santalo/vec.hpp"

namespace santalo {

// Uniform axis. The default [-8, 8] with 2049 nodes has step 2^-7, so node
// coordinates are exact doubles and symmetric pairs mirror exactly.
struct Axis {
  double lo = -8.0;
  double hi = 8.0;
  int count = 2049;

  [[nodiscard]] double step() const { return (hi - lo) / (count - 1); }
  [[nodiscard]] double coord(int i) const { return lo + step() * i; }
  [[nodiscard]] bool contains(double x) const { return x >= lo && x <= hi; }
  [[nodiscard]] bool symmetric() const { return lo == -hi; }

  // Cell index for interpolation, clamped to [0, count-2].
  [[nodiscard]] int cell(double x) const {
    int i = static_cast<int>(std::floor((x - lo) / step()));
    return std::clamp(i, 0, count - 2);
  }

  void validate() const {
    if (count < 2 || !(hi > lo)) throw ConfigError("Axis: need hi > lo and count >= 2");
  }
};

// Values a grid reports outside its box. Log-density grids use -inf (no
// mass); conjugate/partner grids use +inf (conservative for upper bounds).
enum class OutsideValue { kNegInfinity, kPosInfinity };

// Piecewise-(multi)linear function sampled on a 1D or 2D uniform grid.
// Interpolation is exact on the nodes; cells touching a non-finite node
// evaluate to the outside value.
class GridFunction {
 public:
  GridFunction(Axis ax, OutsideValue outside);
  GridFunction(Axis ax, Axis ay, OutsideValue outside);

  template <class F>
  static GridFunction sample1(F&& f, Axis ax, OutsideValue outside) {
    GridFunction g(ax, outside);
    for (int i = 0; i < ax.count; ++i) g.node(i) = f(ax.coord(i));
    return g;
  }

  template <class F>
  static GridFunction sample2(F&& f, Axis ax, Axis ay, OutsideValue outside) {
    GridFunction g(ax, ay, outside);
    for (int i = 0; i < ax.count; ++i)
      for (int j = 0; j < ay.count; ++j) g.node(i, j) = f(ax.coord(i), ay.coord(j));
    return g;
  }

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const Axis& axis(int d) const { return ax_[d]; }
  [[nodiscard]] OutsideValue outside() const { return outside_; }
  [[nodiscard]] double outside_value() const {
    return outside_ == OutsideValue::kNegInfinity ? -kInf : kInf;
  }

  double& node(int ix, int iy = 0) { return v_[index(ix, iy)]; }
  [[nodiscard]] double node(int ix, int iy = 0) const { return v_[index(ix, iy)]; }

  [[nodiscard]] double value(double x) const;
  [[nodiscard]] double value(double x, double y) const;
  [[nodiscard]] double value_at(const Vec& p) const;

  // Exact mirror symmetry of the sampled values (requires symmetric axes).
  [[nodiscard]] bool is_even(double tol = 1e-12) const;

  [[nodiscard]] double min_finite_node() const;

 private:
  [[nodiscard]] std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(ix) * ny_ + iy;
  }

  static constexpr double kInf = std::numeric_limits<double>::infinity();

  int dim_;
  Axis ax_[2];
  std::size_t ny_;  // 1 in 1D
  OutsideValue outside_;
  std::vector<double> v_;
};

}  // namespace santalo
