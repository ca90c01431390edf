#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ghyp/model.hpp"
#include "ghyp/multigraph.hpp"
#include "ghyp/numerics.hpp"

namespace ghyp {

inline constexpr std::size_t kDefaultSamples = 1000;
inline constexpr std::size_t kMinSamples = 30;
inline constexpr int kReportSchemaVersion = 1;

struct LikelihoodRatio {
  double log_likelihood_null = 0.0;
  double log_likelihood_alt = 0.0;
  double log_lambda = 0.0;  // ℓ0 − max(ℓ0, ℓa) ≤ 0
  double lambda = 1.0;      // may underflow to 0 for very large D
  double deviance = 0.0;    // D = −2 log λ ≥ 0
};

LikelihoodRatio lr_statistic(const ModelSpec& null_model, const ModelSpec& alt_model, const MultiGraph& g,
                             const QuadratureConfig& cfg = {});

struct TestOptions {
  ModelKind null_kind = ModelKind::regular;
  ModelKind alt_kind = ModelKind::configuration;
  std::size_t samples = kDefaultSamples;
  std::uint64_t seed = 0;
  const Partition* partition = nullptr;  // required when either kind is block
  QuadratureConfig quadrature{};
  int workers = 0;
};

// Scaled Beta on [0, M]: D / M ~ Beta(alpha, beta).
struct BetaNull {
  double alpha = 1.0;
  double beta = 1.0;
  double upper = 1.0;  // M

  double mean() const { return upper * alpha / (alpha + beta); }
  double variance() const;
  double cdf(double d) const;
  double sf(double d) const;
  double pdf(double d) const;
};

struct NullDistribution {
  std::vector<double> samples;  // D per kept replicate, in replicate order
  BetaNull beta;
  double bound = 0.0;           // multinomial bound before any clamp
  bool bound_clamped = false;   // M raised to 1.05 × max sample
  int nu = 1;                   // χ² comparator dof
  std::size_t requested = 0;    // s
  std::size_t dropped = 0;      // replicates whose refit failed
  std::uint64_t seed = 0;
  double sample_mean = 0.0;
  double sample_variance = 0.0;
};

// D statistics for `count` replicates drawn from `null_model` (fitted on g)
// with g's edge count; both kinds are refitted on every replicate. Replicates
// whose refit fails are dropped and counted in `dropped`.
std::vector<double> null_statistics(const ModelSpec& null_model, const MultiGraph& g, const TestOptions& opts,
                                    std::size_t count, std::uint64_t master_seed, std::size_t& dropped);

NullDistribution null_distribution(const MultiGraph& g, const TestOptions& opts);

// 2m · log(1 / p_min) with p from the null model's expected counts.
double estimate_M(const ModelSpec& null_model, const MultiGraph& g);

// Moment-matched scaled Beta: throws StatisticalError on infeasible moments.
BetaNull fit_beta_moments(double mean, double variance, double upper);
BetaNull fit_beta_null(std::span<const double> samples, double upper);

double p_value_beta(double deviance, const BetaNull& beta);
double p_value_beta(double deviance, const NullDistribution& nd);
double p_value_chi2(double deviance, int nu);

struct TestTimings {
  double fit_ms = 0.0;
  double null_ms = 0.0;
  double total_ms = 0.0;
};

struct TestReport {
  std::string command = "test";
  ModelKind null_kind = ModelKind::regular;
  ModelKind alt_kind = ModelKind::configuration;
  LikelihoodRatio statistic;
  double p_beta = 1.0;
  double p_chi2 = 1.0;
  int nu = 0;
  NullDistribution null;
  nlohmann::json null_model;
  nlohmann::json alt_model;
  bool directed = false;
  bool selfloops = false;
  QuadratureConfig quadrature;
  TestTimings timings;
};

// Nesting order regular ⊂ configuration ⊂ block ⊂ full; throws StatisticalError otherwise.
void require_nested(ModelKind null_kind, ModelKind alt_kind);

TestReport lr_test(const MultiGraph& g, const TestOptions& opts);
// lr_test against the full model.
TestReport gof_test(const MultiGraph& g, TestOptions opts);

struct NullValidation {
  KSReport beta;
  KSReport chi2;
};
NullValidation validate_null(const NullDistribution& nd);

nlohmann::json to_json(const TestReport& report);
std::string dof_rule_description();

}  // namespace ghyp
