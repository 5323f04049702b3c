#include "santalo/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "nlohmann/json.hpp"
#include "santalo/catalog.hpp"
#include "santalo/coupling.hpp"
#include "santalo/errors.hpp"
#include "santalo/inequalities.hpp"
#include "santalo/parallel.hpp"
#include "santalo/report.hpp"
#include "santalo/rng.hpp"
#include "santalo/simulate.hpp"
#include "santalo/transforms.hpp"

namespace santalo {
namespace {

using nlohmann::json;

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---- config field access with scenario-tagged errors ----

[[noreturn]] void bad(const std::string& id, const std::string& msg) {
  throw ConfigError("scenario '" + id + "': " + msg);
}

const json& require_field(const json& j, const char* key, const std::string& id) {
  auto it = j.find(key);
  if (it == j.end()) bad(id, std::string("missing field '") + key + "'");
  return *it;
}

double num_or(const json& j, const char* key, double dflt, const std::string& id) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_number()) bad(id, std::string("'") + key + "' must be a number");
  return it->get<double>();
}

std::int64_t int_or(const json& j, const char* key, std::int64_t dflt, const std::string& id) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_number_integer()) bad(id, std::string("'") + key + "' must be an integer");
  return it->get<std::int64_t>();
}

std::string str_or(const json& j, const char* key, const std::string& dflt,
                   const std::string& id) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_string()) bad(id, std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

std::vector<double> num_array_or(const json& j, const char* key, std::vector<double> dflt,
                                 const std::string& id) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_array() || it->empty()) bad(id, std::string("'") + key + "' must be a non-empty array");
  std::vector<double> out;
  for (const auto& v : *it) {
    if (!v.is_number()) bad(id, std::string("'") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::string> str_array_or(const json& j, const char* key,
                                      std::vector<std::string> dflt, const std::string& id) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_array() || it->empty()) bad(id, std::string("'") + key + "' must be a non-empty array");
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) bad(id, std::string("'") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

// gh rule: 0 means "default for the dimension".
int parse_gh_points(const json& j, const std::string& id) {
  std::string text = str_or(j, "rule", "", id);
  if (text.empty()) return 0;
  RuleSpec spec = RuleSpec::parse(text);
  if (spec.method != RuleSpec::Method::kGaussHermite)
    bad(id, "'rule' must be a gh rule here; use 'mc_check' for Monte Carlo");
  int m = spec.points_per_axis > 0 ? spec.points_per_axis : 128;
  if (m < 2 || m > 512) bad(id, "gh rule needs 2 <= m <= 512");
  return m;
}

std::optional<RuleSpec> parse_mc_check(const json& j, const std::string& id) {
  std::string text = str_or(j, "mc_check", "", id);
  if (text.empty()) return std::nullopt;
  RuleSpec spec = RuleSpec::parse(text);
  if (spec.method != RuleSpec::Method::kMonteCarlo) bad(id, "'mc_check' must be an mc rule");
  if (spec.samples < 100 || spec.samples > 1'000'000'000)
    bad(id, "mc rule needs 100 <= N <= 1e9");
  return spec;
}

QuadratureRule rule_for(int gh_points, int dim) {
  return gh_points > 0 ? QuadratureRule::gauss_hermite(gh_points)
                       : QuadratureRule::default_for_dim(dim);
}

std::vector<int> default_probes(int steps) {
  std::vector<int> p{0, steps / 4, steps / 2, (3 * steps) / 4, steps - 1};
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  return p;
}

std::vector<int> parse_probes(const json& j, int steps, const std::string& id) {
  auto it = j.find("probes");
  if (it == j.end()) return default_probes(steps);
  if (!it->is_array() || it->empty()) bad(id, "'probes' must be a non-empty array");
  std::vector<int> p;
  for (const auto& v : *it) {
    if (!v.is_number_integer()) bad(id, "'probes' must hold integers");
    int k = v.get<int>();
    if (k < 0 || k >= steps) bad(id, "probe step out of range");
    p.push_back(k);
  }
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  return p;
}

Vec parse_vector(const std::string& text, int dim, const std::string& id) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('|', start);
    if (end == std::string::npos) end = text.size();
    try {
      parts.push_back(std::stod(text.substr(start, end - start)));
    } catch (const std::exception&) {
      bad(id, "bad vector component in '" + text + "'");
    }
    start = end + 1;
  }
  if (static_cast<int>(parts.size()) != dim)
    bad(id, "vector '" + text + "' has " + std::to_string(parts.size()) +
                " components, potential has dimension " + std::to_string(dim));
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = parts[i];
  return v;
}

// ---- scenario plans (config fully validated before anything runs) ----

struct TauPlan {
  std::vector<Potential> potentials;
  std::vector<double> cs;
  int gh_points = 0;
  std::optional<RuleSpec> mc;
};

struct SantaloPlan {
  std::vector<Potential> potentials;
  int gh_points = 0;
  std::optional<RuleSpec> mc;
};

struct BodyPlan {
  std::vector<std::pair<std::string, std::shared_ptr<const ConvexPolygon>>> bodies;
};

struct SharpnessPlan {
  std::vector<double> a_values;
  std::vector<double> c_values;
  int gh_points = 0;
};

struct BorellPlan {
  std::optional<Potential> phi;
  std::vector<std::string> drifts;
  SimSpec sim;
  int gh_points = 0;
};

struct CouplePlan {
  std::optional<Potential> phi;
  double c = 0.5;
  CoupledSpec sim;
  int gh_points = 0;
};

struct Plan {
  std::string id;
  std::string mode;
  std::variant<TauPlan, SantaloPlan, BodyPlan, SharpnessPlan, BorellPlan, CouplePlan> body;
};

bool valid_id(const std::string& s) {
  if (s.empty() || s.size() > 64) return false;
  for (char ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.'))
      return false;
  return true;
}

std::vector<Potential> resolve_potentials(const Catalog& cat, const std::vector<std::string>& ids) {
  std::vector<Potential> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(cat.potential(id));
  return out;
}

DriftPolicy make_drift(const std::string& spec, const Potential& phi, const QuadratureRule& rule,
                       const std::string& id) {
  if (spec == "follmer") return follmer_drift(phi, rule).with_label("follmer");
  if (spec == "zero") return DriftPolicy::zero(phi.dim());
  if (spec == "semigroup") return DriftPolicy::semigroup(phi, rule).with_label("semigroup");
  if (spec.rfind("constant:a=", 0) == 0) {
    Vec a = parse_vector(spec.substr(11), phi.dim(), id);
    return DriftPolicy::constant(a);
  }
  bad(id, "unknown drift '" + spec + "' (follmer | zero | semigroup | constant:a=...)");
}

void validate_drift_syntax(const std::string& spec, const Potential& phi, const std::string& id) {
  if (spec == "follmer" || spec == "zero" || spec == "semigroup") return;
  if (spec.rfind("constant:a=", 0) == 0) {
    parse_vector(spec.substr(11), phi.dim(), id);
    return;
  }
  bad(id, "unknown drift '" + spec + "' (follmer | zero | semigroup | constant:a=...)");
}

Plan parse_scenario(const json& j, Catalog& cat, const std::string& config_dir) {
  if (!j.is_object()) throw ConfigError("each scenario must be an object");
  std::string id = str_or(j, "id", "", "?");
  if (!valid_id(id))
    throw ConfigError("scenario id '" + id + "' must be 1-64 chars of [A-Za-z0-9._-]");
  std::string mode = str_or(j, "mode", "", id);

  Plan plan;
  plan.id = id;
  plan.mode = mode;

  if (mode == "tau") {
    TauPlan p;
    p.potentials = resolve_potentials(cat, str_array_or(j, "potentials", Catalog::tau_catalog(), id));
    p.cs = num_array_or(j, "c", {0.25, 0.5}, id);
    for (double c : p.cs)
      if (!(c > 0.0) || !std::isfinite(c)) bad(id, "cost parameters must be positive");
    p.gh_points = parse_gh_points(j, id);
    p.mc = parse_mc_check(j, id);
    plan.body = std::move(p);
  } else if (mode == "santalo") {
    SantaloPlan p;
    p.potentials =
        resolve_potentials(cat, str_array_or(j, "potentials", Catalog::santalo_catalog(), id));
    p.gh_points = parse_gh_points(j, id);
    p.mc = parse_mc_check(j, id);
    plan.body = std::move(p);
  } else if (mode == "body") {
    BodyPlan p;
    std::string corpus = str_or(j, "corpus", "", id);
    if (!corpus.empty()) {
      std::filesystem::path cp(corpus);
      if (cp.is_relative()) cp = std::filesystem::path(config_dir) / cp;
      cat.load_bodies_json(cp.string());
    }
    std::vector<std::string> ids = Catalog::body_catalog();
    for (const auto& extra : cat.loaded_body_ids()) ids.push_back(extra);
    ids = str_array_or(j, "bodies", ids, id);
    for (const auto& bid : ids) p.bodies.emplace_back(bid, cat.body(bid));
    plan.body = std::move(p);
  } else if (mode == "sharpness") {
    SharpnessPlan p;
    p.a_values = num_array_or(j, "a", {0.5, 1.0}, id);
    p.c_values = num_array_or(j, "c", {0.20, 0.24, 0.25, 0.26, 0.30, 0.50}, id);
    for (double c : p.c_values)
      if (!(c > 0.0) || !std::isfinite(c)) bad(id, "cost parameters must be positive");
    p.gh_points = parse_gh_points(j, id);
    plan.body = std::move(p);
  } else if (mode == "borell") {
    BorellPlan p;
    std::string pid = require_field(j, "potential", id).is_string()
                          ? j["potential"].get<std::string>()
                          : (bad(id, "'potential' must be a string"), std::string());
    p.phi = cat.potential(pid);
    p.drifts = str_array_or(j, "drifts", {"follmer", "zero"}, id);
    for (const auto& d : p.drifts) validate_drift_syntax(d, *p.phi, id);
    p.sim.paths = int_or(j, "paths", 20000, id);
    p.sim.steps = static_cast<int>(int_or(j, "steps", 250, id));
    p.sim.seed = static_cast<std::uint64_t>(int_or(j, "seed", 1, id));
    p.sim.probe_steps = parse_probes(j, p.sim.steps, id);
    p.gh_points = parse_gh_points(j, id);
    try {
      p.sim.validate(p.phi->dim());
    } catch (const Error& e) {
      bad(id, e.what());
    }
    plan.body = std::move(p);
  } else if (mode == "couple") {
    CouplePlan p;
    std::string pid = require_field(j, "potential", id).is_string()
                          ? j["potential"].get<std::string>()
                          : (bad(id, "'potential' must be a string"), std::string());
    p.phi = cat.potential(pid);
    p.c = num_or(j, "c", 0.5, id);
    if (!(p.c > 0.0) || !std::isfinite(p.c)) bad(id, "'c' must be positive");
    p.sim.paths = int_or(j, "paths", 20000, id);
    p.sim.steps = static_cast<int>(int_or(j, "steps", 250, id));
    p.sim.seed = static_cast<std::uint64_t>(int_or(j, "seed", 1, id));
    p.sim.probe_steps = parse_probes(j, p.sim.steps, id);
    p.gh_points = parse_gh_points(j, id);
    try {
      p.sim.validate(p.phi->dim());
    } catch (const Error& e) {
      bad(id, e.what());
    }
    plan.body = std::move(p);
  } else {
    bad(id, "unknown mode '" + mode +
                "' (tau | santalo | body | sharpness | borell | couple)");
  }
  return plan;
}

// ---- per-mode execution ----

struct Artifact {
  std::string header;
  std::vector<std::string> lines;
};

void mc_cross_rows(const std::string& scenario, const std::vector<Potential>& potentials,
                   const RuleSpec& mc, std::optional<std::uint64_t> seed_override, bool lebesgue,
                   int gh_points, std::vector<ReportRow>& rows) {
  std::uint64_t seed = seed_override ? *seed_override : mc.seed;
  for (const auto& phi : potentials) {
    QuadratureRule rule = rule_for(gh_points, phi.dim());
    // Same gamma_n integral both ways; Lebesgue-normalized when the check
    // targets densities rather than tilts.
    double scale = lebesgue ? std::pow(2.0 * M_PI, 0.5 * phi.dim()) : 1.0;
    Potential tilt = lebesgue ? santalo_to_tau(phi) : phi;
    double quad = scale * gamma_integral(tilt, rule);
    Estimate est = mc_integrate_exp(tilt, mc.samples, seed);
    ReportRow r;
    r.scenario = scenario;
    r.quantity = "mc-cross[" + phi.label() + "]";
    r.value = scale * est.value;
    r.se = scale * est.std_error;
    r.bound = quad;
    r.margin = quad - r.value;
    double tol = 4.0 * r.se + 1e-12 * std::max(1.0, std::abs(quad));
    r.pass = !est.degenerate && std::abs(r.value - quad) <= tol;
    r.detail = "N=" + std::to_string(mc.samples) + " seed=" + std::to_string(seed) +
               " tol=" + fmt6(tol);
    rows.push_back(r);
  }
}

void run_tau(const std::string& id, const TauPlan& p, std::optional<std::uint64_t> seed_override,
             std::vector<ReportRow>& rows, Artifact& art) {
  art.header = "potential,c,product,bound,margin,centered,flagged";
  for (const auto& phi : p.potentials) {
    QuadratureRule rule = rule_for(p.gh_points, phi.dim());
    for (double c : p.cs) {
      TauCheck t = tau_product(phi, c, rule, CenteringPolicy::kFlagOnly);
      ReportRow r;
      r.scenario = id;
      r.quantity = "tau[c=" + fmt6(c) + "," + phi.label() + "]";
      r.value = t.product;
      r.bound = t.bound;
      r.margin = t.margin;
      r.pass = t.pass;
      r.flagged = t.flagged;
      if (t.flagged)
        r.detail = "uncentered at c > 1/4: bound not claimed (expected violation)";
      rows.push_back(r);
      art.lines.push_back(csv_escape(phi.label()) + ',' + format_double(c) + ',' +
                          format_double(t.product) + ',' + format_double(t.bound) + ',' +
                          format_double(t.margin) + ',' + (t.centered ? "1" : "0") + ',' +
                          (t.flagged ? "1" : "0"));
    }
  }
  if (p.mc) mc_cross_rows(id, p.potentials, *p.mc, seed_override, false, p.gh_points, rows);
}

void run_santalo(const std::string& id, const SantaloPlan& p,
                 std::optional<std::uint64_t> seed_override, std::vector<ReportRow>& rows,
                 Artifact& art) {
  art.header = "potential,dim,f_integral,g_integral,product,bound,gap";
  for (const auto& logf : p.potentials) {
    QuadratureRule rule = rule_for(p.gh_points, logf.dim());
    SantaloCheck s = santalo_product(logf, rule);
    ReportRow r;
    r.scenario = id;
    r.quantity = "santalo[" + logf.label() + "]";
    r.value = s.product;
    r.bound = s.bound;
    r.margin = s.gap;
    r.pass = s.pass;
    r.detail = "f=" + fmt6(s.f_integral) + " g=" + fmt6(s.g_integral) +
               " dim=" + std::to_string(s.dim);
    rows.push_back(r);
    art.lines.push_back(csv_escape(logf.label()) + ',' + std::to_string(s.dim) + ',' +
                        format_double(s.f_integral) + ',' + format_double(s.g_integral) + ',' +
                        format_double(s.product) + ',' + format_double(s.bound) + ',' +
                        format_double(s.gap));
  }
  if (p.mc) mc_cross_rows(id, p.potentials, *p.mc, seed_override, true, p.gh_points, rows);
}

void run_body(const std::string& id, const BodyPlan& p, std::vector<ReportRow>& rows,
              Artifact& art) {
  art.header =
      "body,area,polar_area,product,bound,symmetric,gauge_integral,gauge_expected,gauge_rel_err";
  for (const auto& [bid, body] : p.bodies) {
    BodyCheck b = body_check(*body, bid);
    ReportRow vp;
    vp.scenario = id;
    vp.quantity = "volume-product[" + bid + "]";
    vp.value = b.product;
    vp.bound = b.bound;
    vp.margin = b.bound - b.product;
    vp.pass = b.pass;
    vp.flagged = !b.symmetric;
    if (!b.symmetric) vp.detail = "asymmetric body: upper bound not claimed";
    rows.push_back(vp);

    ReportRow gi;
    gi.scenario = id;
    gi.quantity = "gauge-identity[" + bid + "]";
    gi.value = b.gauge_integral;
    gi.bound = b.gauge_expected;
    gi.margin = b.gauge_expected - b.gauge_integral;
    gi.pass = b.gauge_rel_err <= 1e-4;
    gi.detail = "rel_err=" + fmt6(b.gauge_rel_err);
    rows.push_back(gi);

    art.lines.push_back(csv_escape(bid) + ',' + format_double(b.area) + ',' +
                        format_double(b.polar_area) + ',' + format_double(b.product) + ',' +
                        format_double(b.bound) + ',' + (b.symmetric ? "1" : "0") + ',' +
                        format_double(b.gauge_integral) + ',' + format_double(b.gauge_expected) +
                        ',' + format_double(b.gauge_rel_err));
  }
}

void run_sharpness(const std::string& id, const SharpnessPlan& p, std::vector<ReportRow>& rows,
                   Artifact& art) {
  art.header = "a,c,product,predicted";
  QuadratureRule rule = rule_for(p.gh_points, 1);
  auto pts = sharpness_scan(p.a_values, p.c_values, rule);
  for (const auto& pt : pts) {
    ReportRow r;
    r.scenario = id;
    r.quantity = "sharpness[a=" + fmt6(pt.a) + ",c=" + fmt6(pt.c) + "]";
    r.value = pt.product;
    r.bound = pt.predicted;
    r.margin = pt.predicted - pt.product;
    // Linear phi: quadrature and the closed form must agree to round-off,
    // and the product crosses 1 exactly at c = 1/4.
    bool close = std::abs(pt.product - pt.predicted) <= 1e-9 * std::max(1.0, pt.predicted);
    bool side_ok = pt.c < 0.25 - 1e-12   ? pt.product < 1.0
                   : pt.c > 0.25 + 1e-12 ? true
                                         : std::abs(pt.product - 1.0) <= 1e-9;
    r.pass = close && side_ok;
    r.flagged = pt.c > 0.25 + 1e-12 && pt.product > 1.0;
    if (r.flagged) r.detail = "uncentered beyond c = 1/4: product exceeds 1 as predicted";
    rows.push_back(r);
    art.lines.push_back(format_double(pt.a) + ',' + format_double(pt.c) + ',' +
                        format_double(pt.product) + ',' + format_double(pt.predicted));
  }
}

void run_borell(const std::string& id, const BorellPlan& p,
                std::optional<std::uint64_t> seed_override, std::vector<ReportRow>& rows,
                Artifact& art) {
  art.header = "drift,step,t,coord,mean,se";
  const Potential& phi = *p.phi;
  QuadratureRule rule = rule_for(p.gh_points, phi.dim());
  double lp = std::log(gamma_integral(phi, rule));

  SimSpec spec = p.sim;
  if (seed_override) spec.seed = *seed_override;
  double dt = 1.0 / spec.steps;

  for (const auto& dspec : p.drifts) {
    DriftPolicy drift = make_drift(dspec, phi, rule, id);
    PathBundle bundle = simulate(drift, spec);
    ValueEstimate est = borell_value(phi, bundle);
    bool optimal = dspec == "follmer" || dspec == "semigroup";

    ReportRow r;
    r.scenario = id;
    r.quantity = (optimal ? "borell-value[" : "dominance[") + dspec + "]";
    r.value = est.value;
    r.se = est.std_error;
    r.bound = lp;
    r.margin = lp - est.value;
    if (optimal) {
      // Euler bias is O(dt); 3 SE + dt covers both error sources.
      double tol = 3.0 * est.std_error + dt;
      r.pass = std::abs(est.value - lp) <= tol;
      r.detail = "log-partition=" + fmt6(lp) + " tol=" + fmt6(tol);
    } else {
      r.pass = est.value <= lp + 3.0 * est.std_error + 1e-12;
      r.detail = "suboptimal drift must stay below the log-partition";
    }
    if (bundle.clamped_evals > 0)
      r.detail += " clamped=" + std::to_string(bundle.clamped_evals);
    rows.push_back(r);

    DriftProfile prof = drift_mean_profile(bundle);
    for (int slot = 0; slot < static_cast<int>(bundle.probe_steps.size()); ++slot) {
      int k = bundle.probe_steps[slot];
      for (int d = 0; d < bundle.dim; ++d) {
        art.lines.push_back(csv_escape(dspec) + ',' + std::to_string(k) + ',' +
                            format_double(k * dt) + ',' + std::to_string(d) + ',' +
                            format_double(prof.mean[static_cast<std::size_t>(k) * bundle.dim + d]) +
                            ',' +
                            format_double(prof.se[static_cast<std::size_t>(k) * bundle.dim + d]));
      }
    }

    if (optimal && (phi.is_even() || hermite_friendly(phi))) {
      Vec b = phi.is_even() ? Vec(phi.dim()) : barycenter(phi, rule);
      ReportRow cz;
      cz.scenario = id;
      cz.quantity = "drift-constancy[" + dspec + "]";
      cz.value = prof.max_z(b, bundle.probe_steps);
      cz.bound = 4.0;
      cz.margin = cz.bound - cz.value;
      cz.pass = cz.value <= cz.bound;
      cz.detail = "max |mean - barycenter| / se over probe steps";
      rows.push_back(cz);
    }
  }
}

void run_couple(const std::string& id, const CouplePlan& p,
                std::optional<std::uint64_t> seed_override, std::vector<ReportRow>& rows,
                Artifact& art) {
  art.header = "forward_step,backward_step,mean_inner,se_inner,covariance,se_covariance";
  const Potential& phi = *p.phi;
  CoupledSpec spec = p.sim;
  if (seed_override) spec.seed = *seed_override;

  CoupledRun run = coupled_run(phi, p.c, spec);
  ChainReport rep = chain_report(phi, run.psi, p.c, run.bundle);

  auto push = [&](const std::string& q, double value, double se, double bound, bool pass,
                  const std::string& detail, bool flagged = false) {
    ReportRow r;
    r.scenario = id;
    r.quantity = q;
    r.value = value;
    r.se = se;
    r.bound = bound;
    r.margin = bound - value;
    r.pass = pass;
    r.flagged = flagged;
    r.detail = detail;
    rows.push_back(r);
  };

  push("coupling-identity", rep.worst_identity_err, 0.0, rep.slack,
       rep.identity_violations == 0,
       "X_1 - Y_1 = int u dt - int v dt on every path (shared increments cancel)");
  push("pointwise-partner", rep.worst_pointwise_gap, 0.0, 0.0, rep.pointwise_violations == 0,
       "phi(X_1) + psi(Y_1) <= c|X_1 - Y_1|^2 per path; worst gap shown");
  push("cauchy-schwarz", rep.worst_cs_gap, 0.0, 0.0, rep.cs_violations == 0,
       "|X_1 - Y_1|^2 <= int |u - v^|^2 dt per path; worst gap shown");
  push("chain-order", rep.s.value, 0.0, rep.r.value,
       rep.s.value <= rep.t.value + 1e-12 && rep.t.value <= rep.r.value + 1e-12,
       "S <= T <= R in aggregate (S=" + fmt6(rep.s.value) + " T=" + fmt6(rep.t.value) +
           " R=" + fmt6(rep.r.value) + ")");

  bool assert_s = p.c <= 0.25 + 1e-12 || p.c >= 0.5 - 1e-12;
  push("log-product[S]", rep.s.value, rep.s.std_error, 0.0,
       !assert_s || rep.s.value <= 3.0 * rep.s.std_error,
       "estimates log(int e^phi dgamma) + log(int e^psi dgamma)", !assert_s);
  if (p.c >= 0.5 - 1e-12) {
    push("reversal-mean[R]", rep.r.value, rep.r.std_error, 0.0,
         std::abs(rep.r.value) <= 3.0 * rep.r.std_error + 1e-12,
         "R concentrates at -<barycenter(phi), barycenter(psi)> = 0 when centered");
  }

  const auto& probes = run.bundle.probe_steps;
  int emitted = 0;
  for (int i = 0; i < static_cast<int>(probes.size()) && emitted < 8; ++i) {
    for (int jj = 0; jj < static_cast<int>(probes.size()) && emitted < 8; ++jj) {
      if (probes[i] + probes[jj] > spec.steps) continue;  // overlapping increments
      OrthogonalityStat st = orthogonality_stat(run.bundle, i, jj);
      art.lines.push_back(std::to_string(st.forward_step) + ',' +
                          std::to_string(st.backward_step) + ',' +
                          format_double(st.mean_inner) + ',' + format_double(st.se_inner) + ',' +
                          format_double(st.covariance) + ',' + format_double(st.se_covariance));
      push("orthogonality[k=" + std::to_string(st.forward_step) +
               ",j=" + std::to_string(st.backward_step) + "]",
           st.covariance, st.se_covariance, 0.0,
           std::abs(st.covariance) <= 3.0 * st.se_covariance + 1e-12,
           "cov(u_k, v^_j) over paths; disjoint increment windows");
      ++emitted;
    }
  }

  if (run.bundle.clamped_evals > 0)
    push("clamped-evals", static_cast<double>(run.bundle.clamped_evals), 0.0, 0.0, true,
         "semigroup look-ahead clamps (informational)", true);
}

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int run_scenarios(const RunOptions& options, std::ostream& out, std::ostream& err) {
  auto t0 = std::chrono::steady_clock::now();
  RunInfo info;
  info.config_path = options.config_path;
  info.generator = kGeneratorTag;
  info.seed_override = options.seed;
  info.started_utc = utc_now();

  if (options.workers > 0) set_worker_count(options.workers);
  info.workers = worker_count();

  // Stage 1: parse + resolve everything. Any problem here is exit code 2
  // and nothing gets written.
  std::vector<Plan> plans;
  try {
    std::ifstream in(options.config_path);
    if (!in) throw ConfigError("cannot open config '" + options.config_path + "'");
    json cfg;
    try {
      in >> cfg;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config parse: ") + e.what());
    }
    if (!cfg.is_object() || !cfg.contains("scenarios") || !cfg["scenarios"].is_array() ||
        cfg["scenarios"].empty())
      throw ConfigError("config must be an object with a non-empty 'scenarios' array");

    std::string config_dir = std::filesystem::path(options.config_path).parent_path().string();
    if (config_dir.empty()) config_dir = ".";
    Catalog cat;
    std::set<std::string> seen;
    for (const auto& sj : cfg["scenarios"]) {
      Plan plan = parse_scenario(sj, cat, config_dir);
      if (!seen.insert(plan.id).second)
        throw ConfigError("duplicate scenario id '" + plan.id + "'");
      plans.push_back(std::move(plan));
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }

  // Stage 2: run. Errors here mark the scenario failed but keep going.
  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec) {
    err << "cannot create output directory '" << options.out_dir << "': " << ec.message() << '\n';
    return 2;
  }

  std::vector<ReportRow> rows;
  for (const auto& plan : plans) {
    auto s0 = std::chrono::steady_clock::now();
    std::size_t first_row = rows.size();
    Artifact art;
    try {
      std::visit(
          [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, TauPlan>)
              run_tau(plan.id, p, options.seed, rows, art);
            else if constexpr (std::is_same_v<T, SantaloPlan>)
              run_santalo(plan.id, p, options.seed, rows, art);
            else if constexpr (std::is_same_v<T, BodyPlan>)
              run_body(plan.id, p, rows, art);
            else if constexpr (std::is_same_v<T, SharpnessPlan>)
              run_sharpness(plan.id, p, rows, art);
            else if constexpr (std::is_same_v<T, BorellPlan>)
              run_borell(plan.id, p, options.seed, rows, art);
            else
              run_couple(plan.id, p, options.seed, rows, art);
          },
          plan.body);
    } catch (const Error& e) {
      ReportRow r;
      r.scenario = plan.id;
      r.quantity = "error";
      r.pass = false;
      r.detail = e.what();
      rows.push_back(r);
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - s0).count();
    for (std::size_t i = first_row; i < rows.size(); ++i) rows[i].seconds = secs;

    if (!art.header.empty()) {
      std::string path = options.out_dir + "/" + plan.id + ".csv";
      std::ofstream os(path);
      if (!os) {
        err << "cannot write artifact '" << path << "'\n";
      } else {
        os << art.header << '\n';
        for (const auto& line : art.lines) os << line << '\n';
      }
    }

    if (!options.machine) {
      for (std::size_t i = first_row; i < rows.size(); ++i) {
        const ReportRow& r = rows[i];
        out << (r.pass ? (r.flagged ? "[FLAG]" : "[PASS]") : "[FAIL]") << ' ' << r.scenario << '/'
            << r.quantity << "  value=" << fmt6(r.value);
        if (r.se > 0) out << " se=" << fmt6(r.se);
        out << " bound=" << fmt6(r.bound);
        if (!r.detail.empty()) out << "  (" << r.detail << ')';
        out << '\n';
      }
    }
  }

  info.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  int failures = 0;
  for (const auto& r : rows)
    if (!r.pass) ++failures;

  try {
    write_report_json(options.out_dir + "/report.json", rows, info);
    write_report_csv(options.out_dir + "/report.csv", rows);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return 2;
  }

  if (!options.machine) {
    out << rows.size() << " checks, " << failures << " failed; report under " << options.out_dir
        << "/\n";
  }
  return failures == 0 ? 0 : 1;
}

void print_catalog(std::ostream& out) {
  out << "potentials (tau form: exponents of e^phi dgamma):\n";
  for (const auto& id : Catalog::tau_catalog()) out << "  " << id << '\n';
  out << "log-densities (santalo form, centered):\n";
  for (const auto& id : Catalog::santalo_catalog()) out << "  " << id << '\n';
  out << "bodies:\n";
  for (const auto& id : Catalog::body_catalog()) out << "  " << id << '\n';
  out << "potential grammar:\n"
         "  const:c=<v>[,dim=<n>]          linear:a=<v|v|..>[,c=<v>]\n"
         "  quad:lambda=<v>[,dim=<n>]      quad:q=<d|d|..>,a=<v|v|..>[,c=<v>]\n"
         "  quartic[:coeff=<v>][,dim=<n>]  radial:p=<v>,coeff=<v>[,dim=<n>]\n"
         "  gauge2:<body-id>\n"
         "body grammar:\n"
         "  square | diamond | rect:hx=<v>,hy=<v> | ngon:m=<k>[,r=<v>] | <corpus name>\n"
         "modes: tau | santalo | body | sharpness | borell | couple\n"
         "rules: gh:m=<points>   mc:N=<samples>,seed=<seed>\n";
}

}  // namespace santalo
