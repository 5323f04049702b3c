#include "santalo/catalog.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "santalo/errors.hpp"

namespace santalo {
namespace {

struct Params {
  std::map<std::string, std::string> kv;
  std::string id;

  bool has(const std::string& k) const { return kv.count(k) > 0; }

  double num(const std::string& k, double fallback) const {
    auto it = kv.find(k);
    if (it == kv.end()) return fallback;
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw ConfigError("catalog id '" + id + "': bad number for '" + k + "'");
    }
  }

  double num(const std::string& k) const {
    if (!has(k)) throw ConfigError("catalog id '" + id + "': missing parameter '" + k + "'");
    return num(k, 0.0);
  }

  int integer(const std::string& k, int fallback) const {
    double v = num(k, fallback);
    int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
      throw ConfigError("catalog id '" + id + "': '" + k + "' must be an integer");
    return i;
  }

  Vec vec(const std::string& k) const {
    auto it = kv.find(k);
    if (it == kv.end()) throw ConfigError("catalog id '" + id + "': missing parameter '" + k + "'");
    Vec v(0);
    std::vector<double> comps;
    std::size_t start = 0;
    const std::string& s = it->second;
    while (start <= s.size()) {
      std::size_t end = s.find('|', start);
      if (end == std::string::npos) end = s.size();
      try {
        comps.push_back(std::stod(s.substr(start, end - start)));
      } catch (const std::exception&) {
        throw ConfigError("catalog id '" + id + "': bad vector component in '" + k + "'");
      }
      start = end + 1;
      if (end == s.size()) break;
    }
    if (comps.empty() || comps.size() > static_cast<std::size_t>(kMaxDim))
      throw ConfigError("catalog id '" + id + "': bad vector length in '" + k + "'");
    Vec out(static_cast<int>(comps.size()));
    for (std::size_t i = 0; i < comps.size(); ++i) out[static_cast<int>(i)] = comps[i];
    return out;
  }
};

Params parse_params(const std::string& id, const std::string& text) {
  Params p;
  p.id = id;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string kv = text.substr(start, end - start);
    start = end + 1;
    if (kv.empty()) continue;
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("catalog id '" + id + "': expected key=value, got '" + kv + "'");
    p.kv[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return p;
}

}  // namespace

Catalog::Catalog() = default;

Potential Catalog::potential(const std::string& id) const {
  std::string head = id, tail;
  if (auto pos = id.find(':'); pos != std::string::npos) {
    head = id.substr(0, pos);
    tail = id.substr(pos + 1);
  }
  if (head == "gauge2") {
    // tail is a body id (which may itself carry parameters)
    if (tail.empty()) throw ConfigError("catalog id '" + id + "': gauge2 needs a body id");
    return Potential::gauge_power(body(tail), 2.0, 0.5).with_label(id);
  }
  Params p = parse_params(id, tail);
  if (head == "const") {
    int dim = p.integer("dim", 1);
    return Potential::constant(dim, p.num("c")).with_label(id);
  }
  if (head == "linear") {
    Vec a = p.vec("a");
    return Potential::linear(a, p.num("c", 0.0)).with_label(id);
  }
  if (head == "quad") {
    if (p.has("q")) {
      Vec d = p.vec("q");
      Vec a = p.has("a") ? p.vec("a") : Vec(d.dim());
      if (a.dim() != d.dim()) throw ConfigError("catalog id '" + id + "': a/q length mismatch");
      return Potential::quadratic(SymMat::diag(d), a, p.num("c", 0.0)).with_label(id);
    }
    double lambda = p.num("lambda");
    int dim = p.integer("dim", 1);
    Potential out = Potential::isotropic_quadratic(dim, lambda);
    if (p.has("a")) {
      Vec a = p.vec("a");
      if (a.dim() != dim) throw ConfigError("catalog id '" + id + "': a length != dim");
      out = Potential::quadratic(SymMat::isotropic(dim, lambda), a, p.num("c", 0.0));
    }
    return out.with_label(id);
  }
  if (head == "quartic") {
    int dim = p.integer("dim", 1);
    return Potential::radial_power(dim, 4.0, p.num("coeff", 0.25)).with_label(id);
  }
  if (head == "radial") {
    int dim = p.integer("dim", 1);
    return Potential::radial_power(dim, p.num("p"), p.num("coeff")).with_label(id);
  }
  throw ConfigError("catalog id '" + id + "': unknown potential kind '" + head + "'");
}

std::shared_ptr<const ConvexPolygon> Catalog::body(const std::string& id) const {
  if (auto it = loaded_bodies_.find(id); it != loaded_bodies_.end()) return it->second;
  std::string head = id, tail;
  if (auto pos = id.find(':'); pos != std::string::npos) {
    head = id.substr(0, pos);
    tail = id.substr(pos + 1);
  }
  try {
    if (head == "square") return std::make_shared<ConvexPolygon>(ConvexPolygon::square());
    if (head == "diamond") return std::make_shared<ConvexPolygon>(ConvexPolygon::diamond());
    if (head == "rect") {
      Params p = parse_params(id, tail);
      return std::make_shared<ConvexPolygon>(ConvexPolygon::rectangle(p.num("hx"), p.num("hy")));
    }
    if (head == "ngon") {
      Params p = parse_params(id, tail);
      return std::make_shared<ConvexPolygon>(
          ConvexPolygon::regular_ngon(p.integer("m", 0), p.num("r", 1.0)));
    }
  } catch (const GeometryError& e) {
    throw ConfigError("catalog body '" + id + "': " + e.what());
  }
  throw ConfigError("catalog body '" + id + "': unknown body");
}

void Catalog::load_bodies_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open body corpus '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("body corpus '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw ConfigError("body corpus '" + path + "': expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_array())
      throw ConfigError("body corpus '" + path + "': '" + it.key() + "' is not a vertex list");
    std::vector<Point2> verts;
    for (const auto& v : it.value()) {
      if (!v.is_array() || v.size() != 2)
        throw ConfigError("body corpus '" + path + "': '" + it.key() + "' has a bad vertex");
      verts.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    try {
      loaded_bodies_[it.key()] = std::make_shared<ConvexPolygon>(std::move(verts));
    } catch (const GeometryError& e) {
      throw ConfigError("body corpus '" + path + "': '" + it.key() + "': " + e.what());
    }
  }
}

std::vector<std::string> Catalog::tau_catalog() {
  return {"const:c=0.5",        "linear:a=1.0",  "quad:lambda=0.5",
          "quad:lambda=1.0",    "quad:lambda=2.0", "quartic",
          "gauge2:square",      "quad:lambda=1.0,dim=2"};
}

std::vector<std::string> Catalog::santalo_catalog() {
  return {"quad:lambda=1.0", "quad:lambda=1.0,dim=2", "quartic", "gauge2:square"};
}

std::vector<std::string> Catalog::body_catalog() {
  return {"square", "diamond", "rect:hx=2,hy=0.5", "ngon:m=8", "ngon:m=64"};
}

std::vector<std::string> Catalog::loaded_body_ids() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : loaded_bodies_) out.push_back(k);
  return out;
}

}  // namespace santalo
