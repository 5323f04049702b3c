#include "santalo/polygon.hpp"

#include <cmath>

namespace santalo {
namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

}  // namespace

ConvexPolygon::ConvexPolygon(std::vector<Point2> vertices) : v_(std::move(vertices)) {
  int n = size();
  if (n < 3) throw GeometryError("polygon: need at least 3 vertices");
  double scale = 0.0;
  for (const auto& p : v_) scale = std::max({scale, std::abs(p[0]), std::abs(p[1])});
  if (!(scale > 0.0) || !std::isfinite(scale)) throw GeometryError("polygon: degenerate vertices");
  double tol = 1e-12 * scale * scale;
  for (int i = 0; i < n; ++i) {
    double c = cross(v_[i], v_[(i + 1) % n], v_[(i + 2) % n]);
    if (c <= tol)
      throw GeometryError("polygon: vertices must be strictly convex in counter-clockwise order");
  }
  normal_.resize(n);
  offset_.resize(n);
  for (int i = 0; i < n; ++i) {
    const Point2& a = v_[i];
    const Point2& b = v_[(i + 1) % n];
    // outward normal of a CCW edge
    double nx = b[1] - a[1];
    double ny = a[0] - b[0];
    double len = std::hypot(nx, ny);
    nx /= len;
    ny /= len;
    double h = nx * a[0] + ny * a[1];
    if (h <= tol) throw GeometryError("polygon: origin must be strictly inside");
    normal_[i] = {nx, ny};
    offset_[i] = h;
  }
}

ConvexPolygon ConvexPolygon::square(double r) { return rectangle(r, r); }

ConvexPolygon ConvexPolygon::rectangle(double hx, double hy) {
  if (!(hx > 0.0) || !(hy > 0.0)) throw GeometryError("rectangle: half-widths must be positive");
  return ConvexPolygon({{hx, -hy}, {hx, hy}, {-hx, hy}, {-hx, -hy}});
}

ConvexPolygon ConvexPolygon::diamond(double r) {
  if (!(r > 0.0)) throw GeometryError("diamond: radius must be positive");
  return ConvexPolygon({{r, 0.0}, {0.0, r}, {-r, 0.0}, {0.0, -r}});
}

ConvexPolygon ConvexPolygon::regular_ngon(int m, double circumradius) {
  if (m < 3) throw GeometryError("regular_ngon: need m >= 3");
  if (!(circumradius > 0.0)) throw GeometryError("regular_ngon: radius must be positive");
  std::vector<Point2> v(m);
  for (int i = 0; i < m; ++i) {
    double t = 2.0 * M_PI * i / m;
    v[i] = {circumradius * std::cos(t), circumradius * std::sin(t)};
  }
  return ConvexPolygon(std::move(v));
}

double ConvexPolygon::area() const {
  int n = size();
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const Point2& a = v_[i];
    const Point2& b = v_[(i + 1) % n];
    s += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * s;
}

double ConvexPolygon::gauge(double x, double y) const {
  double g = 0.0;
  int n = size();
  for (int i = 0; i < n; ++i) {
    double t = (normal_[i][0] * x + normal_[i][1] * y) / offset_[i];
    if (t > g) g = t;
  }
  return g;
}

Point2 ConvexPolygon::gauge_gradient(double x, double y) const {
  double g = -1.0;
  int best = 0;
  int n = size();
  for (int i = 0; i < n; ++i) {
    double t = (normal_[i][0] * x + normal_[i][1] * y) / offset_[i];
    if (t > g) {
      g = t;
      best = i;
    }
  }
  return {normal_[best][0] / offset_[best], normal_[best][1] / offset_[best]};
}

ConvexPolygon ConvexPolygon::polar() const {
  // Vertices of the polar are the poles n_i / h_i of the edges, in the same
  // CCW order; consecutive edge poles are automatically the intersections of
  // the dual constraint lines {y . v_i = 1}.
  int n = size();
  std::vector<Point2> w(n);
  for (int i = 0; i < n; ++i) w[i] = {normal_[i][0] / offset_[i], normal_[i][1] / offset_[i]};
  return ConvexPolygon(std::move(w));
}

bool ConvexPolygon::is_origin_symmetric(double tol) const {
  int n = size();
  if (n % 2 != 0) return false;
  double scale = max_vertex_radius();
  for (int i = 0; i < n / 2; ++i) {
    const Point2& a = v_[i];
    const Point2& b = v_[i + n / 2];
    if (std::abs(a[0] + b[0]) > tol * scale || std::abs(a[1] + b[1]) > tol * scale) return false;
  }
  return true;
}

double ConvexPolygon::max_vertex_radius() const {
  double r = 0.0;
  for (const auto& p : v_) r = std::max(r, std::hypot(p[0], p[1]));
  return r;
}

double volume_product(const ConvexPolygon& body) { return body.area() * body.polar().area(); }

}  // namespace santalo
