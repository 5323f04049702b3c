#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "santalo/polygon.hpp"
#include "santalo/potential.hpp"

namespace santalo {

// Name resolution for potentials and convex bodies.
//
// Potential ids: "const:c=0.5", "linear:a=1.0", "quad:lambda=0.5",
// "quad:lambda=1.0,dim=2", "quartic", "radial:p=4,coeff=0.25", and
// "gauge2:<body-id>" (the density exponent -gauge^2/2). Vector parameters
// use '|' separators: "linear:a=1|0".
//
// Body ids: "square", "diamond", "rect:hx=2,hy=0.5", "ngon:m=64", plus any
// body loaded from a JSON corpus {"name": [[x,y], ...], ...}.
class Catalog {
 public:
  Catalog();

  [[nodiscard]] Potential potential(const std::string& id) const;
  [[nodiscard]] std::shared_ptr<const ConvexPolygon> body(const std::string& id) const;

  void load_bodies_json(const std::string& path);

  // Curated entries the sweep modes iterate by default.
  [[nodiscard]] static std::vector<std::string> tau_catalog();
  [[nodiscard]] static std::vector<std::string> santalo_catalog();
  [[nodiscard]] static std::vector<std::string> body_catalog();
  [[nodiscard]] std::vector<std::string> loaded_body_ids() const;

 private:
  std::map<std::string, std::shared_ptr<const ConvexPolygon>> loaded_bodies_;
};

}  // namespace santalo
