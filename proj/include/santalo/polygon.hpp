#pragma once

#include <array>
#include <string>
#include <vector>

#include "santalo/errors.hpp"

namespace santalo {

using Point2 = std::array<double, 2>;

// Convex body in the plane given by its vertices in counter-clockwise order.
// Construction validates strict convexity and that the origin is interior;
// both are required for the gauge and the polar to make sense.
class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Point2> vertices);

  static ConvexPolygon square(double r = 1.0);             // [-r, r]^2
  static ConvexPolygon rectangle(double hx, double hy);    // [-hx,hx]x[-hy,hy]
  static ConvexPolygon diamond(double r = 1.0);            // |x|+|y| <= r
  static ConvexPolygon regular_ngon(int m, double circumradius = 1.0);

  [[nodiscard]] int size() const { return static_cast<int>(v_.size()); }
  [[nodiscard]] const Point2& vertex(int i) const { return v_[i]; }
  [[nodiscard]] const std::vector<Point2>& vertices() const { return v_; }

  [[nodiscard]] double area() const;

  // Minkowski gauge: min{t > 0 : (x,y)/t in K}. Evaluated as the max of the
  // supporting half-plane functionals; exact on vertices and edges.
  [[nodiscard]] double gauge(double x, double y) const;

  // Gradient of the gauge (the active edge's scaled normal). At the origin
  // this is a subgradient pick: the first maximizing edge.
  [[nodiscard]] Point2 gauge_gradient(double x, double y) const;

  [[nodiscard]] ConvexPolygon polar() const;

  [[nodiscard]] bool is_origin_symmetric(double tol = 1e-12) const;
  [[nodiscard]] double max_vertex_radius() const;

 private:
  std::vector<Point2> v_;
  // Edge i joins v_[i] to v_[i+1]; outward normal n_i with n_i . x = h_i on
  // the edge, h_i > 0 because the origin is interior.
  std::vector<Point2> normal_;
  std::vector<double> offset_;
};

// area(K) * area(polar K); at most pi^2 for origin-symmetric bodies.
double volume_product(const ConvexPolygon& body);

}  // namespace santalo
