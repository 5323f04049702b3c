#include "santalo/grid.hpp"

#include <limits>

namespace santalo {

GridFunction::GridFunction(Axis ax, OutsideValue outside)
    : dim_(1), ny_(1), outside_(outside) {
  ax.validate();
  ax_[0] = ax;
  v_.assign(static_cast<std::size_t>(ax.count), 0.0);
}

GridFunction::GridFunction(Axis ax, Axis ay, OutsideValue outside)
    : dim_(2), ny_(static_cast<std::size_t>(ay.count)), outside_(outside) {
  ax.validate();
  ay.validate();
  ax_[0] = ax;
  ax_[1] = ay;
  v_.assign(static_cast<std::size_t>(ax.count) * ay.count, 0.0);
}

double GridFunction::value(double x) const {
  if (dim_ != 1) throw DimensionError("GridFunction: 1D lookup on 2D grid");
  const Axis& a = ax_[0];
  if (!a.contains(x)) return outside_value();
  int i = a.cell(x);
  double t = (x - a.coord(i)) / a.step();
  double v0 = v_[i], v1 = v_[i + 1];
  if (!std::isfinite(v0) || !std::isfinite(v1)) return outside_value();
  return v0 + t * (v1 - v0);
}

double GridFunction::value(double x, double y) const {
  if (dim_ != 2) throw DimensionError("GridFunction: 2D lookup on 1D grid");
  const Axis& a = ax_[0];
  const Axis& b = ax_[1];
  if (!a.contains(x) || !b.contains(y)) return outside_value();
  int i = a.cell(x);
  int j = b.cell(y);
  double tx = (x - a.coord(i)) / a.step();
  double ty = (y - b.coord(j)) / b.step();
  double v00 = node(i, j), v10 = node(i + 1, j), v01 = node(i, j + 1), v11 = node(i + 1, j + 1);
  if (!std::isfinite(v00) || !std::isfinite(v10) || !std::isfinite(v01) || !std::isfinite(v11))
    return outside_value();
  double v0 = v00 + tx * (v10 - v00);
  double v1 = v01 + tx * (v11 - v01);
  return v0 + ty * (v1 - v0);
}

double GridFunction::value_at(const Vec& p) const {
  if (p.dim() != dim_) throw DimensionError("GridFunction: point dimension mismatch");
  return dim_ == 1 ? value(p[0]) : value(p[0], p[1]);
}

bool GridFunction::is_even(double tol) const {
  for (int d = 0; d < dim_; ++d)
    if (!ax_[d].symmetric()) return false;
  int nx = ax_[0].count;
  int ny = dim_ == 2 ? ax_[1].count : 1;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      double a = node(i, j), b = node(nx - 1 - i, ny - 1 - j);
      if (std::isfinite(a) != std::isfinite(b)) return false;
      if (std::isfinite(a) && std::abs(a - b) > tol * (1.0 + std::abs(a))) return false;
    }
  }
  return true;
}

double GridFunction::min_finite_node() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : v_)
    if (std::isfinite(v) && v < m) m = v;
  return m;
}

}  // namespace santalo
