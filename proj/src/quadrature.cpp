#include "santalo/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "santalo/parallel.hpp"
#include "santalo/rng.hpp"

namespace santalo {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogHuge = 709.0;   // past this exp() overflows
constexpr double kLogTiny = -708.0;  // below this exp() underflows to 0

void check_quadrature_dim(const Potential& phi) {
  if (phi.dim() > 3)
    throw DimensionError("tensor quadrature supports dim <= 3; use mc_integrate_exp");
}

// Flat tensor index -> node coordinates.
inline void decode(std::int64_t flat, int dim, int m, const std::vector<double>& nodes, Vec* x,
                   int* idx) {
  for (int d = dim - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % m);
    (*x)[d] = nodes[idx[d]];
    flat /= m;
  }
}

// e^phi dgamma with a pure quadratic phi = -x'Qx/2 + ... is integrable iff
// I + Q is positive definite; quadrature would otherwise return a finite
// number for a divergent integral.
void check_quadratic_integrability(const Potential& phi) {
  if (phi.is_pure_quadratic() &&
      !phi.quad_part().q.plus_scaled_identity(1.0).is_positive_definite())
    throw IntegrabilityError("e^phi is not integrable against the Gaussian");
}

// Fills a_i = log w_i + phi(x_i) over the tensor grid.
std::vector<double> log_terms(const Potential& phi, const QuadratureRule& rule) {
  check_quadratic_integrability(phi);
  const int dim = phi.dim();
  const int m = rule.points_per_axis();
  std::int64_t total = 1;
  for (int d = 0; d < dim; ++d) total *= m;
  const auto& nodes = rule.nodes();
  const auto& logw = rule.log_weights();
  std::vector<double> a(static_cast<std::size_t>(total));
  // Dimension errors surface before the parallel region; the loop body must
  // not throw.
  (void)phi.value(Vec(dim));
  parallel_for(total, [&](std::int64_t i) {
    Vec x(dim);
    int idx[3] = {0, 0, 0};
    decode(i, dim, m, nodes, &x, idx);
    double lw = 0.0;
    for (int d = 0; d < dim; ++d) lw += logw[idx[d]];
    a[static_cast<std::size_t>(i)] = lw + phi.value(x);
  });
  return a;
}

double log_sum_exp_destructive(std::vector<double>* a) {
  double mx = -kInf;
  for (double v : *a) {
    if (std::isnan(v)) throw IntegrabilityError("integrand evaluated to NaN");
    if (v > mx) mx = v;
  }
  if (mx == -kInf) throw IntegrabilityError("e^phi has no mass on the quadrature grid");
  if (mx == kInf) throw IntegrabilityError("phi is unbounded above");
  for (double& v : *a) v = std::exp(v - mx);
  double s = pairwise_sum(a->data(), a->size());
  return mx + std::log(s);
}

double finish_log_integral(double log_value) {
  if (log_value > kLogHuge) throw IntegrabilityError("integral of e^phi overflows");
  if (log_value < kLogTiny) throw IntegrabilityError("integral of e^phi underflows to zero");
  return log_value;
}

}  // namespace

namespace {

// Orthonormal probabilists' Hermite recurrence at x:
//   p_0 = 1, p_1 = x, p_{k+1} = (x p_k - sqrt(k) p_{k-1}) / sqrt(k+1).
// Yields log sum_{k<m} p_k(x)^2 (the reciprocal Christoffel weight) and the
// Newton correction p_m / (sqrt(m) p_{m-1}) for polishing zeros of p_m.
// Log-scaled: near the extreme nodes the sum reaches e^{x^2/2 + O(log)},
// which overflows doubles long before the weight itself underflows.
struct ChristoffelEval {
  double log_inv_weight;
  double newton;
};

ChristoffelEval christoffel(double x, int m) {
  double prev = 1.0, cur = x, sq = 1.0, log_scale = 0.0;
  for (int k = 1; k < m; ++k) {
    sq += cur * cur;
    double nxt = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                 std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = nxt;
    if (sq > 1e280) {
      double s = std::sqrt(sq);
      prev /= s;
      cur /= s;
      sq = 1.0;
      log_scale += 2.0 * std::log(s);
    }
  }
  return {std::log(sq) + log_scale, cur / (std::sqrt(static_cast<double>(m)) * prev)};
}

}  // namespace

QuadratureRule QuadratureRule::gauss_hermite(int m) {
  if (m < 1 || m > 1024) throw ConfigError("gauss_hermite: points per axis out of range");
  // Nodes: eigenvalues of the probabilists' Hermite Jacobi matrix (zero
  // diagonal, off-diagonal sqrt(k)), Newton-polished against the recurrence.
  // Weights come from the Christoffel sum, not from eigenvector components:
  // the first component of an edge eigenvector is ~1e-51 at m = 128, far
  // below the eigensolver's absolute accuracy, and squaring that noise gives
  // weights wrong by dozens of orders of magnitude. Harmless for decaying
  // integrands, fatal for growing ones (Moreau partners grow like e^{a|y|^2}).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd sub(m > 1 ? m - 1 : 0);
  for (int k = 1; k < m; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("gauss_hermite: eigensolver failed");

  QuadratureRule r;
  r.nodes_.resize(m);
  for (int i = 0; i < m; ++i) {
    double x = es.eigenvalues()(i);
    x -= christoffel(x, m).newton;
    x -= christoffel(x, m).newton;
    r.nodes_[i] = x;
  }
  // Enforce exact +-x symmetry so even integrands integrate symmetrically.
  for (int i = 0, j = m - 1; i < j; ++i, --j) {
    double x = 0.5 * (r.nodes_[j] - r.nodes_[i]);
    r.nodes_[i] = -x;
    r.nodes_[j] = x;
  }
  if (m % 2 == 1) r.nodes_[m / 2] = 0.0;

  r.weights_.resize(m);
  r.log_weights_.resize(m);
  for (int i = 0; i < m; ++i) {
    // p_k(-x)^2 = p_k(x)^2 exactly, so paired nodes get identical weights.
    r.log_weights_[i] = -christoffel(r.nodes_[i], m).log_inv_weight;
    r.weights_[i] = std::exp(r.log_weights_[i]);
  }
  return r;
}

QuadratureRule QuadratureRule::default_for_dim(int dim) {
  switch (dim) {
    case 1: return gauss_hermite(128);
    case 2: return gauss_hermite(96);
    case 3: return gauss_hermite(48);
    default: throw DimensionError("tensor quadrature supports dim <= 3");
  }
}

RuleSpec RuleSpec::parse(const std::string& text) {
  RuleSpec spec;
  std::string head = text, params;
  if (auto pos = text.find(':'); pos != std::string::npos) {
    head = text.substr(0, pos);
    params = text.substr(pos + 1);
  }
  if (head == "gh") {
    spec.method = Method::kGaussHermite;
  } else if (head == "mc") {
    spec.method = Method::kMonteCarlo;
    spec.samples = 100000;
  } else {
    throw ConfigError("rule '" + text + "': unknown method '" + head + "'");
  }
  std::size_t start = 0;
  while (start < params.size()) {
    std::size_t end = params.find(',', start);
    if (end == std::string::npos) end = params.size();
    std::string kv = params.substr(start, end - start);
    start = end + 1;
    if (kv.empty()) continue;
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("rule '" + text + "': expected key=value");
    std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    try {
      if (key == "m" && spec.method == Method::kGaussHermite) {
        spec.points_per_axis = std::stoi(val);
      } else if (key == "N" && spec.method == Method::kMonteCarlo) {
        spec.samples = std::stoll(val);
      } else if (key == "seed" && spec.method == Method::kMonteCarlo) {
        spec.seed = std::stoull(val);
      } else {
        throw ConfigError("rule '" + text + "': unknown key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("rule '" + text + "': bad value for '" + key + "'");
    }
  }
  return spec;
}

std::string RuleSpec::str() const {
  if (method == Method::kGaussHermite)
    return points_per_axis > 0 ? "gh:m=" + std::to_string(points_per_axis) : "gh";
  return "mc:N=" + std::to_string(samples) + ",seed=" + std::to_string(seed);
}

double log_partition(const Potential& phi, const QuadratureRule& rule) {
  check_quadrature_dim(phi);
  std::vector<double> a = log_terms(phi, rule);
  return finish_log_integral(log_sum_exp_destructive(&a));
}

double integrate_exp(const Potential& phi, const QuadratureRule& rule) {
  return std::exp(log_partition(phi, rule));
}

double log_partition(const Potential& phi) {
  return log_partition(phi, QuadratureRule::default_for_dim(phi.dim()));
}

double integrate_exp(const Potential& phi) { return std::exp(log_partition(phi)); }

Vec barycenter(const Potential& phi, const QuadratureRule& rule) {
  check_quadrature_dim(phi);
  const int dim = phi.dim();
  const int m = rule.points_per_axis();
  const auto& nodes = rule.nodes();
  std::vector<double> a = log_terms(phi, rule);
  double mx = -kInf;
  for (double v : a) {
    if (std::isnan(v)) throw IntegrabilityError("integrand evaluated to NaN");
    if (v > mx) mx = v;
  }
  if (!std::isfinite(mx)) throw IntegrabilityError("e^phi has no usable mass");
  for (double& v : a) v = std::exp(v - mx);
  double denom = pairwise_sum(a.data(), a.size());
  if (!(denom > 0.0)) throw IntegrabilityError("e^phi has no usable mass");

  Vec b(dim);
  std::vector<double> scratch(a.size());
  for (int d = 0; d < dim; ++d) {
    std::int64_t block = 1;
    for (int k = d + 1; k < dim; ++k) block *= m;
    parallel_for(static_cast<std::int64_t>(a.size()), [&](std::int64_t i) {
      int idx = static_cast<int>((i / block) % m);
      scratch[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] * nodes[idx];
    });
    b[d] = pairwise_sum(scratch.data(), scratch.size()) / denom;
  }
  return b;
}

Vec barycenter(const Potential& phi) {
  return barycenter(phi, QuadratureRule::default_for_dim(phi.dim()));
}

Estimate mc_integrate_exp(const Potential& phi, std::int64_t samples, std::uint64_t seed) {
  if (samples < 2) throw ConfigError("mc_integrate_exp: need at least 2 samples");
  check_quadratic_integrability(phi);
  const int dim = phi.dim();
  (void)phi.value(Vec(dim));
  std::vector<double> v(static_cast<std::size_t>(samples));
  parallel_for(samples, [&](std::int64_t i) {
    NormalStream st(seed, StreamPurpose::kMcSamples, static_cast<std::uint64_t>(i));
    Vec x(dim);
    for (int d = 0; d < dim; ++d) x[d] = st.normal(static_cast<std::uint64_t>(d));
    v[static_cast<std::size_t>(i)] = std::exp(phi.value(x));
  });
  double mean = pairwise_sum(v.data(), v.size()) / static_cast<double>(samples);
  if (!std::isfinite(mean)) throw IntegrabilityError("Monte Carlo mean is not finite");
  std::vector<double> d2(v.size());
  parallel_for(samples, [&](std::int64_t i) {
    double d = v[static_cast<std::size_t>(i)] - mean;
    d2[static_cast<std::size_t>(i)] = d * d;
  });
  double ssq = pairwise_sum(d2.data(), d2.size());
  Estimate e;
  e.value = mean;
  e.samples = samples;
  e.degenerate = (ssq == 0.0);
  e.std_error = std::sqrt(ssq / static_cast<double>(samples - 1)) /
                std::sqrt(static_cast<double>(samples));
  return e;
}

Estimate integrate_exp(const Potential& phi, const RuleSpec& spec) {
  if (spec.method == RuleSpec::Method::kMonteCarlo)
    return mc_integrate_exp(phi, spec.samples, spec.seed);
  QuadratureRule rule = spec.points_per_axis > 0 ? QuadratureRule::gauss_hermite(spec.points_per_axis)
                                                 : QuadratureRule::default_for_dim(phi.dim());
  Estimate e;
  e.value = integrate_exp(phi, rule);
  return e;
}

double integrate_exp_lebesgue(const Potential& logf, double radius, int points_per_axis) {
  const int dim = logf.dim();
  if (dim > 3) throw DimensionError("integrate_exp_lebesgue supports dim <= 3");
  // Against Lebesgue measure there is no Gaussian factor to lean on.
  if (logf.is_pure_quadratic() && !logf.quad_part().q.is_positive_definite())
    throw IntegrabilityError("e^logf is not integrable over R^n");
  if (!(radius > 0.0) || points_per_axis < 2)
    throw ConfigError("integrate_exp_lebesgue: bad box or resolution");
  const int m = points_per_axis;
  const double h = 2.0 * radius / (m - 1);
  std::int64_t total = 1;
  for (int d = 0; d < dim; ++d) total *= m;
  (void)logf.value(Vec(dim));
  std::vector<double> buf(static_cast<std::size_t>(total));
  parallel_for(total, [&](std::int64_t flat) {
    std::int64_t rem = flat;
    Vec x(dim);
    double w = 1.0;
    for (int d = dim - 1; d >= 0; --d) {
      int idx = static_cast<int>(rem % m);
      rem /= m;
      x[d] = -radius + h * idx;
      if (idx == 0 || idx == m - 1) w *= 0.5;  // trapezoid boundary weight
    }
    double lv = logf.value(x);
    buf[static_cast<std::size_t>(flat)] = lv == -kInf ? 0.0 : w * std::exp(lv);
  });
  double s = pairwise_sum(buf.data(), buf.size());
  for (int d = 0; d < dim; ++d) s *= h;
  if (!std::isfinite(s)) throw IntegrabilityError("Lebesgue integral is not finite");
  if (!(s > 0.0)) throw IntegrabilityError("Lebesgue integral vanished");
  return s;
}

double integrate_exp_lebesgue(const Potential& logf) {
  const int dim = logf.dim();
  // Grow the box until the integrand is below the mass cutoff along a fan of
  // probe directions (or the hard cap is reached).
  constexpr double kCutoff = -46.0;  // e^-46 ~ 1e-20
  std::vector<Vec> dirs;
  if (dim == 1) {
    dirs = {Vec{1.0}, Vec{-1.0}};
  } else if (dim == 2) {
    for (int k = 0; k < 16; ++k) {
      double t = 2.0 * M_PI * k / 16;
      dirs.push_back(Vec{std::cos(t), std::sin(t)});
    }
  } else {
    for (int sx = -1; sx <= 1; ++sx)
      for (int sy = -1; sy <= 1; ++sy)
        for (int sz = -1; sz <= 1; ++sz) {
          if (!sx && !sy && !sz) continue;
          Vec d{static_cast<double>(sx), static_cast<double>(sy), static_cast<double>(sz)};
          dirs.push_back((1.0 / d.norm()) * d);
        }
  }
  double radius = 1.0;
  while (radius < 64.0) {
    bool covered = true;
    for (const Vec& d : dirs) {
      if (logf.value(radius * d) > kCutoff) {
        covered = false;
        break;
      }
    }
    if (covered) break;
    radius *= 1.25;
  }
  int pts = dim == 1 ? 8193 : dim == 2 ? 2049 : 257;
  return integrate_exp_lebesgue(logf, radius, pts);
}

Potential recenter(const Potential& phi, const QuadratureRule& rule) {
  Vec b = barycenter(phi, rule);
  if (b.norm() < 1e-13) return phi;
  Potential centered = phi.shifted_density(b);
  Vec check = barycenter(centered, rule);
  if (check.norm() > 1e-8)
    throw CenteringError("recenter: barycenter still " + check.str() + " after shift");
  return centered;
}

namespace ref {

double integrate_exp(const Potential& phi, const QuadratureRule& rule) {
  check_quadrature_dim(phi);
  check_quadratic_integrability(phi);
  const int dim = phi.dim();
  const int m = rule.points_per_axis();
  std::int64_t total = 1;
  for (int d = 0; d < dim; ++d) total *= m;
  const auto& nodes = rule.nodes();
  const auto& logw = rule.log_weights();
  double mx = -kInf;
  for (std::int64_t i = 0; i < total; ++i) {
    Vec x(dim);
    int idx[3] = {0, 0, 0};
    decode(i, dim, m, nodes, &x, idx);
    double lw = 0.0;
    for (int d = 0; d < dim; ++d) lw += logw[idx[d]];
    double a = lw + phi.value(x);
    if (a > mx) mx = a;
  }
  if (!std::isfinite(mx)) throw IntegrabilityError("e^phi has no usable mass");
  double s = 0.0;
  for (std::int64_t i = 0; i < total; ++i) {
    Vec x(dim);
    int idx[3] = {0, 0, 0};
    decode(i, dim, m, nodes, &x, idx);
    double lw = 0.0;
    for (int d = 0; d < dim; ++d) lw += logw[idx[d]];
    s += std::exp(lw + phi.value(x) - mx);
  }
  return std::exp(finish_log_integral(mx + std::log(s)));
}

Estimate mc_integrate_exp(const Potential& phi, std::int64_t samples, std::uint64_t seed) {
  if (samples < 2) throw ConfigError("mc_integrate_exp: need at least 2 samples");
  check_quadratic_integrability(phi);
  const int dim = phi.dim();
  double sum = 0.0;
  std::vector<double> v(static_cast<std::size_t>(samples));
  for (std::int64_t i = 0; i < samples; ++i) {
    NormalStream st(seed, StreamPurpose::kMcSamples, static_cast<std::uint64_t>(i));
    Vec x(dim);
    for (int d = 0; d < dim; ++d) x[d] = st.normal(static_cast<std::uint64_t>(d));
    v[static_cast<std::size_t>(i)] = std::exp(phi.value(x));
    sum += v[static_cast<std::size_t>(i)];
  }
  double mean = sum / static_cast<double>(samples);
  double ssq = 0.0;
  for (double x : v) ssq += (x - mean) * (x - mean);
  Estimate e;
  e.value = mean;
  e.samples = samples;
  e.degenerate = (ssq == 0.0);
  e.std_error =
      std::sqrt(ssq / static_cast<double>(samples - 1)) / std::sqrt(static_cast<double>(samples));
  return e;
}

}  // namespace ref
}  // namespace santalo
