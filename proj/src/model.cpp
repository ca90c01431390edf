#include "ghyp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ghyp/error.hpp"

namespace ghyp {

namespace {

std::int64_t require_edges(const MultiGraph& g) {
  if (g.edge_count() <= 0) throw StatisticalError("cannot fit a model to a graph without edges");
  return g.edge_count();
}

// Scales Ω so its maximum over dyads with capacity is 1 and lifts zeros to the
// relative floor. Dyads without capacity get Ω = 1 (their value is irrelevant).
void canonicalize_omega(std::vector<double>& omega, const std::vector<double>& xi) {
  double top = 0.0;
  for (std::size_t k = 0; k < omega.size(); ++k) {
    if (xi[k] > 0.0) top = std::max(top, omega[k]);
  }
  if (!(top > 0.0) || !std::isfinite(top)) {
    throw StatisticalError("propensity matrix has no positive finite entry");
  }
  for (std::size_t k = 0; k < omega.size(); ++k) {
    if (xi[k] <= 0.0) {
      omega[k] = 1.0;
    } else {
      omega[k] = std::max(omega[k] / top, kOmegaFloor);
    }
  }
}

// Propensity that makes Ξ (1 − e^{−ω}) reproduce `count`, with saturated
// cells pulled just below capacity and empty ones left at zero (floored later).
double invert_wallenius_mean(double count, double capacity) {
  if (count <= 0.0) return 0.0;
  double ratio = count / capacity;
  if (ratio >= 1.0) ratio = count / (capacity + 0.5);
  return -std::log1p(-ratio);
}

void check_evaluable(const ModelSpec& model, const MultiGraph& g) {
  if (!(model.layout == g.layout())) {
    throw DomainError("model and graph have different dyad layouts");
  }
  if (model.xi.size() != g.counts().size() || model.omega.size() != g.counts().size()) {
    throw DomainError("model matrices do not match the graph");
  }
  for (std::size_t k = 0; k < model.xi.size(); ++k) {
    if (static_cast<double>(g.counts()[k]) > model.xi[k]) {
      const auto& d = g.layout()[k];
      throw StatisticalError("capacity violation: A(" + g.labels()[d.source] + "," + g.labels()[d.target] +
                             ")=" + std::to_string(g.counts()[k]) + " exceeds Xi=" + std::to_string(model.xi[k]));
    }
  }
}

double sum_log_binomials(const ModelSpec& model, const MultiGraph& g) {
  double acc = 0.0;
  for (std::size_t k = 0; k < model.xi.size(); ++k) {
    const auto a = g.counts()[k];
    if (a > 0) acc += log_binomial(model.xi[k], static_cast<double>(a));
  }
  return acc;
}

// log of ∫_0^1 Π (1 − z^{w_k / S})^{x_k} dz. With z = exp(−S y) the log
// integrand g(y) = log S − S y + Σ x_k log(1 − e^{−w_k y}) is concave, so the
// integral is split at its mode y* and each half mapped onto (0, 1) with the
// curvature scale σ = (−g''(y*))^{−1/2}.
class WalleniusIntegral {
 public:
  WalleniusIntegral(std::vector<double> counts, std::vector<double> weights, double s)
      : x_(std::move(counts)), w_(std::move(weights)), s_(s), log_s_(std::log(s)) {}

  double log_value(const QuadratureConfig& cfg) const {
    const double mode = find_mode();
    const double peak = g(mode);
    const double curvature = -g2(mode);
    if (!(curvature > 0.0) || !std::isfinite(curvature)) {
      throw ConvergenceError("Wallenius integrand has a degenerate mode");
    }
    const double sigma = 1.0 / std::sqrt(curvature);
    auto right = [&](double u) {
      const double y = mode + sigma * u / (1.0 - u);
      return std::exp(g(y) - peak - 2.0 * std::log1p(-u));
    };
    // The left map stops exactly at y = 0; cutting it off inside the interval
    // leaves a kink the error estimate can miss.
    const double u_zero = mode / (mode + sigma);
    auto left = [&](double t) {
      const double u = u_zero * t;
      const double y = mode - sigma * u / (1.0 - u);
      if (y <= 0.0) return 0.0;
      return u_zero * std::exp(g(y) - peak - 2.0 * std::log1p(-u));
    };
    const double total = integrate_unit_interval(left, cfg) + integrate_unit_interval(right, cfg);
    return peak + std::log(sigma) + std::log(total);
  }

 private:
  double g(double y) const {
    double acc = log_s_ - s_ * y;
    for (std::size_t k = 0; k < x_.size(); ++k) acc += x_[k] * std::log(-std::expm1(-w_[k] * y));
    return acc;
  }

  double g1(double y) const {
    double acc = -s_;
    for (std::size_t k = 0; k < x_.size(); ++k) {
      const double e = std::exp(-w_[k] * y);
      acc += x_[k] * w_[k] * e / -std::expm1(-w_[k] * y);
    }
    return acc;
  }

  double g2(double y) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < x_.size(); ++k) {
      const double e = std::exp(-w_[k] * y);
      const double one_minus = -std::expm1(-w_[k] * y);
      acc -= x_[k] * w_[k] * w_[k] * e / (one_minus * one_minus);
    }
    return acc;
  }

  // g' decreases from +inf to −S; bracket and bisect on a log scale.
  double find_mode() const {
    const double m = std::accumulate(x_.begin(), x_.end(), 0.0);
    double lo = m / s_;
    double hi = lo;
    for (int i = 0; g1(lo) <= 0.0; ++i) {
      if (i > 2000) throw ConvergenceError("Wallenius mode: lower bracket not found");
      lo *= 0.5;
    }
    for (int i = 0; g1(hi) > 0.0; ++i) {
      if (i > 2000) throw ConvergenceError("Wallenius mode: upper bracket not found");
      hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
      const double mid = std::sqrt(lo * hi);
      const double probe = (mid > lo && mid < hi) ? mid : 0.5 * (lo + hi);
      if (g1(probe) > 0.0) {
        lo = probe;
      } else {
        hi = probe;
      }
    }
    return 0.5 * (lo + hi);
  }

  std::vector<double> x_;
  std::vector<double> w_;
  double s_;
  double log_s_;
};

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::regular: return "regular";
    case ModelKind::configuration: return "configuration";
    case ModelKind::block: return "block";
    case ModelKind::full: return "full";
    case ModelKind::custom: return "custom";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "regular") return ModelKind::regular;
  if (name == "configuration" || name == "config" || name == "cm") return ModelKind::configuration;
  if (name == "block") return ModelKind::block;
  if (name == "full") return ModelKind::full;
  if (name == "custom") return ModelKind::custom;
  throw DomainError("unknown model kind '" + std::string(name) + "'");
}

double ModelSpec::total_capacity() const { return std::accumulate(xi.begin(), xi.end(), 0.0); }

bool ModelSpec::has_uniform_omega() const {
  std::optional<double> first;
  for (std::size_t k = 0; k < omega.size(); ++k) {
    if (xi[k] <= 0.0) continue;
    if (!first) {
      first = omega[k];
    } else if (std::abs(omega[k] - *first) > 1e-14 * std::abs(*first)) {
      return false;
    }
  }
  return true;
}

int configuration_dof(const DyadLayout& layout) {
  const auto n = static_cast<int>(layout.vertex_count());
  return layout.directed() ? 2 * n - 1 : n;
}

ModelSpec fit_regular(const MultiGraph& g) {
  const auto m = static_cast<double>(require_edges(g));
  const auto n = static_cast<double>(g.vertex_count());
  // Configuration rule evaluated at the mean degrees.
  const double mean_out = (g.directed() ? m : 2.0 * m) / n;
  const double mean_in = mean_out;
  ModelSpec model;
  model.kind = ModelKind::regular;
  model.layout = g.layout();
  model.xi.assign(g.layout().size(), mean_out * mean_in);
  if (!g.directed()) {
    for (std::size_t k = 0; k < g.layout().size(); ++k) {
      if (g.layout()[k].source == g.layout()[k].target) model.xi[k] *= 0.5;
    }
  }
  model.omega.assign(g.layout().size(), 1.0);
  model.free_parameters = 1;
  return model;
}

ModelSpec fit_configuration(const MultiGraph& g) {
  require_edges(g);
  const auto deg = degrees(g);
  ModelSpec model;
  model.kind = ModelKind::configuration;
  model.layout = g.layout();
  model.xi.resize(g.layout().size());
  for (std::size_t k = 0; k < g.layout().size(); ++k) {
    const auto& d = g.layout()[k];
    double xi = static_cast<double>(deg.out[d.source]) * static_cast<double>(deg.in[d.target]);
    if (!g.directed() && d.source == d.target) xi *= 0.5;
    model.xi[k] = xi;
  }
  model.omega.assign(g.layout().size(), 1.0);
  model.free_parameters = configuration_dof(g.layout());
  return model;
}

ModelSpec fit_block(const MultiGraph& g, const Partition& p) {
  if (p.group_of.size() != g.vertex_count()) {
    throw DomainError("partition covers " + std::to_string(p.group_of.size()) + " vertices, graph has " +
                      std::to_string(g.vertex_count()));
  }
  const std::size_t groups = p.group_count();
  if (groups == 0) throw DomainError("partition has no groups");
  for (auto r : p.group_of) {
    if (r >= groups) throw DomainError("partition group index out of range");
  }
  ModelSpec model = fit_configuration(g);
  model.kind = ModelKind::block;
  auto block_of = [&](const Dyad& d) {
    std::size_t r = p.group_of[d.source];
    std::size_t s = p.group_of[d.target];
    if (!g.directed() && r > s) std::swap(r, s);
    return r * groups + s;
  };
  std::vector<double> block_edges(groups * groups, 0.0);
  std::vector<double> block_capacity(groups * groups, 0.0);
  for (std::size_t k = 0; k < g.layout().size(); ++k) {
    const auto b = block_of(g.layout()[k]);
    block_edges[b] += static_cast<double>(g.counts()[k]);
    block_capacity[b] += model.xi[k];
  }
  std::vector<double> block_omega(groups * groups, 0.0);
  for (std::size_t b = 0; b < block_omega.size(); ++b) {
    if (block_capacity[b] > 0.0) block_omega[b] = invert_wallenius_mean(block_edges[b], block_capacity[b]);
  }
  for (std::size_t k = 0; k < g.layout().size(); ++k) model.omega[k] = block_omega[block_of(g.layout()[k])];
  canonicalize_omega(model.omega, model.xi);
  model.partition = p;
  const auto b = static_cast<int>(groups);
  model.free_parameters += g.directed() ? b * b - 1 : b * (b + 1) / 2 - 1;
  return model;
}

ModelSpec fit_full(const MultiGraph& g) {
  ModelSpec model = fit_configuration(g);
  model.kind = ModelKind::full;
  for (std::size_t k = 0; k < g.layout().size(); ++k) {
    if (model.xi[k] > 0.0) model.omega[k] = invert_wallenius_mean(static_cast<double>(g.counts()[k]), model.xi[k]);
  }
  canonicalize_omega(model.omega, model.xi);
  model.free_parameters = configuration_dof(g.layout()) + static_cast<int>(g.layout().size()) - 1;
  return model;
}

ModelSpec make_custom(const DyadLayout& layout, std::vector<double> xi, std::vector<double> omega,
                      int free_parameters) {
  if (xi.size() != layout.size()) throw DomainError("custom Xi does not match the dyad layout");
  if (omega.empty()) omega.assign(layout.size(), 1.0);
  if (omega.size() != layout.size()) throw DomainError("custom Omega does not match the dyad layout");
  for (std::size_t k = 0; k < xi.size(); ++k) {
    if (!(xi[k] >= 0.0) || !std::isfinite(xi[k])) throw DomainError("Xi entries must be finite and >= 0");
    if (xi[k] > 0.0 && !(omega[k] > 0.0)) throw DomainError("Omega must be positive where Xi > 0");
  }
  ModelSpec model;
  model.kind = ModelKind::custom;
  model.layout = layout;
  model.xi = std::move(xi);
  model.omega = std::move(omega);
  canonicalize_omega(model.omega, model.xi);
  model.free_parameters = free_parameters;
  return model;
}

ModelSpec fit_model(ModelKind kind, const MultiGraph& g, const Partition* partition) {
  switch (kind) {
    case ModelKind::regular: return fit_regular(g);
    case ModelKind::configuration: return fit_configuration(g);
    case ModelKind::block:
      if (partition == nullptr) throw DomainError("block model requires a partition");
      return fit_block(g, *partition);
    case ModelKind::full: return fit_full(g);
    case ModelKind::custom: break;
  }
  throw DomainError("custom models are supplied, not fitted");
}

double log_likelihood_central(const ModelSpec& model, const MultiGraph& g) {
  check_evaluable(model, g);
  const double total = model.total_capacity();
  return sum_log_binomials(model, g) - log_binomial(total, static_cast<double>(g.edge_count()));
}

double log_likelihood_wallenius(const ModelSpec& model, const MultiGraph& g, const QuadratureConfig& cfg) {
  check_evaluable(model, g);
  std::vector<double> counts;
  std::vector<double> weights;
  double s = 0.0;
  for (std::size_t k = 0; k < model.xi.size(); ++k) {
    if (model.xi[k] <= 0.0) continue;
    const auto a = static_cast<double>(g.counts()[k]);
    s += model.omega[k] * (model.xi[k] - a);
    if (a > 0.0) {
      counts.push_back(a);
      weights.push_back(model.omega[k]);
    }
  }
  const double binomials = sum_log_binomials(model, g);
  // No edges, or every slot drawn: the integral equals 1.
  if (counts.empty() || !(s > 0.0)) return binomials;
  return binomials + WalleniusIntegral(std::move(counts), std::move(weights), s).log_value(cfg);
}

double log_likelihood(const ModelSpec& model, const MultiGraph& g, const QuadratureConfig& cfg) {
  if (model.has_uniform_omega()) return log_likelihood_central(model, g);
  return log_likelihood_wallenius(model, g, cfg);
}

std::vector<double> expected_counts(const ModelSpec& model, std::int64_t m) {
  const double total = model.total_capacity();
  const auto target = static_cast<double>(m);
  if (m < 0 || target > total * (1.0 + 1e-12)) {
    throw StatisticalError("expected_counts: m=" + std::to_string(m) + " exceeds total capacity " +
                           std::to_string(total));
  }
  std::vector<double> expected(model.xi.size(), 0.0);
  if (m == 0) return expected;
  if (target >= total) return model.xi;
  // Solve Σ Ξ (1 − e^{−Ω u}) = m for u = −log t.
  auto filled = [&](double u) {
    double acc = 0.0;
    for (std::size_t k = 0; k < model.xi.size(); ++k) acc += model.xi[k] * -std::expm1(-model.omega[k] * u);
    return acc;
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; filled(hi) < target; ++i) {
    if (i > 2000) throw StatisticalError("expected_counts: failed to bracket the mean equation");
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 400 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (filled(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double u = 0.5 * (lo + hi);
  double sum = 0.0;
  for (std::size_t k = 0; k < model.xi.size(); ++k) {
    expected[k] = model.xi[k] * -std::expm1(-model.omega[k] * u);
    sum += expected[k];
  }
  for (auto& e : expected) e *= target / sum;
  return expected;
}

int degrees_of_freedom(const ModelSpec& model) { return model.free_parameters; }

namespace {

nlohmann::json dense(const DyadLayout& layout, const std::vector<double>& values) {
  const std::size_t n = layout.vertex_count();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t k = 0; k < layout.size(); ++k) {
    out[layout[k].source * n + layout[k].target] = values[k];
    if (!layout.directed()) out[layout[k].target * n + layout[k].source] = values[k];
  }
  return out;
}

std::vector<double> from_dense(const DyadLayout& layout, const nlohmann::json& value, const char* name) {
  const std::size_t n = layout.vertex_count();
  std::vector<double> out(layout.size());
  if (value.is_number()) {
    std::fill(out.begin(), out.end(), value.get<double>());
    return out;
  }
  const auto flat = value.get<std::vector<double>>();
  if (flat.size() != n * n) throw ParseError(std::string(name) + " must hold n*n entries", 0);
  for (std::size_t k = 0; k < layout.size(); ++k) out[k] = flat[layout[k].source * n + layout[k].target];
  return out;
}

}  // namespace

nlohmann::json to_json(const ModelSpec& model) {
  nlohmann::json doc;
  doc["kind"] = to_string(model.kind);
  doc["n"] = model.layout.vertex_count();
  doc["directed"] = model.layout.directed();
  doc["selfloops"] = model.layout.selfloops();
  const bool scalar_xi =
      !model.xi.empty() && std::all_of(model.xi.begin(), model.xi.end(), [&](double x) { return x == model.xi.front(); });
  doc["xi"] = scalar_xi ? nlohmann::json(model.xi.front()) : dense(model.layout, model.xi);
  doc["omega"] = dense(model.layout, model.omega);
  doc["partition"] = model.partition ? nlohmann::json(model.partition->group_of) : nlohmann::json(nullptr);
  doc["free_parameters"] = model.free_parameters;
  return doc;
}

ModelSpec model_from_json(const nlohmann::json& doc) {
  try {
    DyadLayout layout(doc.at("n").get<std::size_t>(), doc.at("directed").get<bool>(),
                      doc.at("selfloops").get<bool>());
    auto xi = from_dense(layout, doc.at("xi"), "xi");
    std::vector<double> omega;
    if (doc.contains("omega") && !doc["omega"].is_null()) omega = from_dense(layout, doc["omega"], "omega");
    ModelSpec model = make_custom(layout, std::move(xi), std::move(omega), doc.value("free_parameters", 0));
    model.kind = parse_model_kind(doc.value("kind", std::string("custom")));
    if (doc.contains("partition") && doc["partition"].is_array()) {
      model.partition = make_partition(doc["partition"].get<std::vector<std::size_t>>());
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid model document: ") + e.what(), 0);
  }
}

nlohmann::json summary_json(const ModelSpec& model) {
  double omega_min = 1.0;
  for (std::size_t k = 0; k < model.omega.size(); ++k) {
    if (model.xi[k] > 0.0) omega_min = std::min(omega_min, model.omega[k]);
  }
  nlohmann::json doc;
  doc["kind"] = to_string(model.kind);
  doc["free_parameters"] = model.free_parameters;
  doc["total_capacity"] = model.total_capacity();
  doc["uniform_omega"] = model.has_uniform_omega();
  doc["omega_min"] = omega_min;
  if (model.partition) doc["groups"] = model.partition->group_count();
  return doc;
}

}  // namespace ghyp
