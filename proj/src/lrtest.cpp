#include "ghyp/lrtest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "ghyp/error.hpp"
#include "ghyp/parallel.hpp"
#include "ghyp/sampler.hpp"

namespace ghyp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

int nesting_rank(ModelKind kind) {
  switch (kind) {
    case ModelKind::regular: return 0;
    case ModelKind::configuration: return 1;
    case ModelKind::block: return 2;
    case ModelKind::full: return 3;
    case ModelKind::custom: break;
  }
  throw StatisticalError("custom models cannot be refitted and are not testable");
}

void require_samples(std::size_t s) {
  if (s < kMinSamples) {
    throw StatisticalError("at least " + std::to_string(kMinSamples) + " null samples are required, got " +
                           std::to_string(s));
  }
}

}  // namespace

LikelihoodRatio lr_statistic(const ModelSpec& null_model, const ModelSpec& alt_model, const MultiGraph& g,
                             const QuadratureConfig& cfg) {
  LikelihoodRatio r;
  r.log_likelihood_null = log_likelihood(null_model, g, cfg);
  r.log_likelihood_alt = log_likelihood(alt_model, g, cfg);
  r.log_lambda = r.log_likelihood_null - std::max(r.log_likelihood_null, r.log_likelihood_alt);
  r.lambda = std::exp(r.log_lambda);
  r.deviance = -2.0 * r.log_lambda;
  return r;
}

double BetaNull::variance() const {
  const double ab = alpha + beta;
  return upper * upper * alpha * beta / (ab * ab * (ab + 1.0));
}

double BetaNull::cdf(double d) const {
  if (d <= 0.0) return 0.0;
  if (d >= upper) return 1.0;
  return reg_inc_beta(d / upper, alpha, beta);
}

double BetaNull::sf(double d) const {
  if (d <= 0.0) return 1.0;
  if (d >= upper) return 0.0;
  return reg_inc_beta_complement(d / upper, alpha, beta);
}

double BetaNull::pdf(double d) const {
  if (d < 0.0 || d > upper) return 0.0;
  return beta_pdf(d / upper, alpha, beta) / upper;
}

std::vector<double> null_statistics(const ModelSpec& null_model, const MultiGraph& g, const TestOptions& opts,
                                    std::size_t count, std::uint64_t master_seed, std::size_t& dropped) {
  const std::int64_t m = g.edge_count();
  std::vector<std::optional<double>> slots(count);
  parallel_for(count, resolve_workers(opts.workers), [&](std::size_t i) {
    const MultiGraph replicate = sample_graph(null_model, m, derive_seed(master_seed, i), g.labels());
    try {
      const ModelSpec refit_null = fit_model(opts.null_kind, replicate, opts.partition);
      const ModelSpec refit_alt = fit_model(opts.alt_kind, replicate, opts.partition);
      slots[i] = lr_statistic(refit_null, refit_alt, replicate, opts.quadrature).deviance;
    } catch (const Error&) {
      slots[i].reset();
    }
  });
  std::vector<double> out;
  out.reserve(count);
  dropped = 0;
  for (const auto& slot : slots) {
    if (slot) {
      out.push_back(*slot);
    } else {
      ++dropped;
    }
  }
  return out;
}

double estimate_M(const ModelSpec& null_model, const MultiGraph& g) {
  const std::int64_t m = g.edge_count();
  if (m <= 0) throw StatisticalError("estimate_M: graph has no edges");
  const auto expected = expected_counts(null_model, m);
  double p_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < expected.size(); ++k) {
    if (null_model.xi[k] > 0.0) p_min = std::min(p_min, expected[k] / static_cast<double>(m));
  }
  if (!(p_min > 0.0) || !std::isfinite(p_min)) throw StatisticalError("estimate_M: null model has a zero-probability dyad");
  const double bound = 2.0 * static_cast<double>(m) * std::log(1.0 / p_min);
  if (!(bound > 0.0)) throw StatisticalError("estimate_M: degenerate null model (single admissible dyad)");
  return bound;
}

BetaNull fit_beta_moments(double mu, double variance, double upper) {
  if (!(upper > 0.0)) throw StatisticalError("fit_beta: upper bound M must be positive");
  if (!(mu > 0.0 && mu < upper)) throw StatisticalError("fit_beta: mean must lie strictly inside (0, M)");
  if (!(variance > 0.0)) throw StatisticalError("fit_beta: null samples have zero variance");
  const double spread = mu * (upper - mu);
  if (!(variance < spread)) {
    throw StatisticalError("fit_beta: infeasible moments (variance >= mean*(M-mean)); M is underestimated");
  }
  BetaNull b;
  b.upper = upper;
  b.alpha = mu * (spread - variance) / (upper * variance);
  b.beta = (upper - mu) * b.alpha / mu;
  return b;
}

BetaNull fit_beta_null(std::span<const double> samples, double upper) {
  if (samples.size() < 2) throw StatisticalError("fit_beta: need at least two samples");
  return fit_beta_moments(mean(samples), sample_variance(samples), upper);
}

double p_value_beta(double deviance, const BetaNull& beta) { return beta.sf(deviance); }

double p_value_beta(double deviance, const NullDistribution& nd) { return p_value_beta(deviance, nd.beta); }

double p_value_chi2(double deviance, int nu) {
  if (deviance <= 0.0) return 1.0;
  return chi2_sf(deviance, nu);
}

NullDistribution null_distribution(const MultiGraph& g, const TestOptions& opts) {
  require_samples(opts.samples);
  const ModelSpec null_model = fit_model(opts.null_kind, g, opts.partition);
  const ModelSpec alt_model = fit_model(opts.alt_kind, g, opts.partition);
  NullDistribution nd;
  nd.requested = opts.samples;
  nd.seed = opts.seed;
  nd.nu = degrees_of_freedom(alt_model) - degrees_of_freedom(null_model);
  nd.samples = null_statistics(null_model, g, opts, opts.samples, opts.seed, nd.dropped);
  if (nd.dropped * 100 > opts.samples) {
    throw StatisticalError(std::to_string(nd.dropped) + " of " + std::to_string(opts.samples) +
                           " null replicates failed to refit (more than 1%)");
  }
  nd.sample_mean = mean(nd.samples);
  nd.sample_variance = sample_variance(nd.samples);
  nd.bound = estimate_M(null_model, g);
  double upper = nd.bound;
  const double largest = *std::max_element(nd.samples.begin(), nd.samples.end());
  if (largest > upper) {
    upper = 1.05 * largest;
    nd.bound_clamped = true;
  }
  nd.beta = fit_beta_moments(nd.sample_mean, nd.sample_variance, upper);
  return nd;
}

void require_nested(ModelKind null_kind, ModelKind alt_kind) {
  if (nesting_rank(alt_kind) < nesting_rank(null_kind)) {
    throw StatisticalError("models are not nested: '" + std::string(to_string(null_kind)) +
                           "' is not a special case of '" + std::string(to_string(alt_kind)) + "'");
  }
}

TestReport lr_test(const MultiGraph& g, const TestOptions& opts) {
  const auto start = Clock::now();
  require_nested(opts.null_kind, opts.alt_kind);
  require_samples(opts.samples);
  opts.quadrature.validate();
  TestReport report;
  report.null_kind = opts.null_kind;
  report.alt_kind = opts.alt_kind;
  report.directed = g.directed();
  report.selfloops = g.selfloops();
  report.quadrature = opts.quadrature;
  const ModelSpec null_model = fit_model(opts.null_kind, g, opts.partition);
  const ModelSpec alt_model = fit_model(opts.alt_kind, g, opts.partition);
  report.null_model = summary_json(null_model);
  report.alt_model = summary_json(alt_model);
  report.nu = degrees_of_freedom(alt_model) - degrees_of_freedom(null_model);
  if (opts.null_kind == opts.alt_kind) {
    // Identical hypotheses: λ = 1 on every graph, no null distribution needed.
    report.statistic.log_likelihood_null = report.statistic.log_likelihood_alt =
        log_likelihood(null_model, g, opts.quadrature);
    report.null.requested = opts.samples;
    report.null.seed = opts.seed;
    report.null.nu = report.nu;
    report.timings.total_ms = elapsed_ms(start);
    return report;
  }
  report.statistic = lr_statistic(null_model, alt_model, g, opts.quadrature);
  report.timings.fit_ms = elapsed_ms(start);
  const auto null_start = Clock::now();
  report.null = null_distribution(g, opts);
  report.timings.null_ms = elapsed_ms(null_start);
  report.p_beta = p_value_beta(report.statistic.deviance, report.null);
  report.p_chi2 = report.nu >= 1 ? p_value_chi2(report.statistic.deviance, report.nu) : 1.0;
  report.timings.total_ms = elapsed_ms(start);
  return report;
}

TestReport gof_test(const MultiGraph& g, TestOptions opts) {
  opts.alt_kind = ModelKind::full;
  TestReport report = lr_test(g, opts);
  report.command = "gof";
  return report;
}

NullValidation validate_null(const NullDistribution& nd) {
  if (nd.samples.size() < kMinSamples) throw StatisticalError("validate_null: fewer than 30 samples");
  if (nd.nu < 1) throw StatisticalError("validate_null: chi-squared comparator needs nu >= 1");
  NullValidation v;
  v.beta = ks_test(nd.samples, [&](double d) { return nd.beta.cdf(d); });
  v.chi2 = ks_test(nd.samples, [&](double d) { return d <= 0.0 ? 0.0 : chi2_cdf(d, nd.nu); });
  return v;
}

std::string dof_rule_description() {
  return "regular=1; configuration=2n-1 (directed) or n (undirected); block=configuration+B^2-1 (directed) or "
         "configuration+B(B+1)/2-1 (undirected); full=configuration+cells-1; nu=dof(alt)-dof(null)";
}

nlohmann::json to_json(const TestReport& report) {
  nlohmann::json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["command"] = report.command;
  doc["lambda"] = report.statistic.lambda;
  doc["log_lambda"] = report.statistic.log_lambda;
  doc["D"] = report.statistic.deviance;
  doc["log_likelihood_null"] = report.statistic.log_likelihood_null;
  doc["log_likelihood_alt"] = report.statistic.log_likelihood_alt;
  doc["p_beta"] = report.p_beta;
  doc["p_chi2"] = report.p_chi2;
  const bool has_null = !report.null.samples.empty();
  doc["alpha"] = has_null ? nlohmann::json(report.null.beta.alpha) : nlohmann::json(nullptr);
  doc["beta"] = has_null ? nlohmann::json(report.null.beta.beta) : nlohmann::json(nullptr);
  doc["M"] = has_null ? nlohmann::json(report.null.beta.upper) : nlohmann::json(nullptr);
  doc["M_bound"] = has_null ? nlohmann::json(report.null.bound) : nlohmann::json(nullptr);
  doc["M_clamped"] = report.null.bound_clamped;
  doc["nu"] = report.nu;
  doc["s"] = report.null.requested;
  doc["seed"] = report.null.seed;
  doc["dropped_replicates"] = report.null.dropped;
  doc["null_mean"] = has_null ? nlohmann::json(report.null.sample_mean) : nlohmann::json(nullptr);
  doc["null_variance"] = has_null ? nlohmann::json(report.null.sample_variance) : nlohmann::json(nullptr);
  doc["null_model"] = report.null_model;
  doc["alt_model"] = report.alt_model;
  doc["convention"] = {
      {"directedness", report.directed ? "directed" : "undirected"},
      {"selfloops", report.selfloops},
      {"dof_rule", dof_rule_description()},
      {"undirected_xi_diagonal", "k_i^2/2"},
      {"regular_xi", "mean(k_out)*mean(k_in)"},
  };
  doc["quadrature"] = {{"relative_tolerance", report.quadrature.relative_tolerance},
                       {"absolute_tolerance", report.quadrature.absolute_tolerance},
                       {"max_subdivisions", report.quadrature.max_subdivisions}};
  doc["timings_ms"] = {{"fit", report.timings.fit_ms},
                       {"null_distribution", report.timings.null_ms},
                       {"total", report.timings.total_ms}};
  return doc;
}

}  // namespace ghyp
