#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace ghyp {

struct QuadratureConfig {
  double relative_tolerance = 1e-10;
  double absolute_tolerance = 1e-12;
  int max_subdivisions = 2048;

  // Throws DomainError unless tolerances are positive and max_subdivisions >= 1.
  void validate() const;
};

struct KSReport {
  double statistic = 0.0;  // sup |F_n - F|
  double p_value = 1.0;    // asymptotic two-sided
  std::size_t sample_size = 0;
};

// log Γ(x) for x > 0; thread-safe.
double log_gamma(double x);

// log C(n, k) generalized to real arguments through the gamma function.
double log_binomial(double n, double k);

// Regularized incomplete beta I_x(a, b) and its complement 1 - I_x(a, b).
// The complement is computed directly so that upper tails keep full
// relative precision far below 1e-16.
double reg_inc_beta(double x, double a, double b);
double reg_inc_beta_complement(double x, double a, double b);

// Density of Beta(a, b) on [0, 1].
double beta_pdf(double x, double a, double b);

// Chi-squared distribution with `dof` degrees of freedom.
double chi2_sf(double x, int dof);
double chi2_cdf(double x, int dof);
double chi2_pdf(double x, int dof);

// Adaptive Gauss–Kronrod (G7/K15) integration over the open unit interval.
// Intervals are refined globally by largest error estimate. Nodes never touch
// the endpoints, so integrable endpoint singularities are tolerated.
// Throws ConvergenceError when max_subdivisions is exhausted.
double integrate_unit_interval(const std::function<double(double)>& integrand,
                               const QuadratureConfig& cfg = {});

// Limiting Kolmogorov distribution: Pr(K > lambda).
double kolmogorov_sf(double lambda);

// One-sample two-sided Kolmogorov–Smirnov test against `cdf`.
KSReport ks_test(std::span<const double> samples, const std::function<double(double)>& cdf);

double mean(std::span<const double> values);
// Unbiased (n - 1) sample variance.
double sample_variance(std::span<const double> values);

// Fisher–Pearson moment coefficient g1 = m3 / m2^{3/2}.
double sample_skewness(std::span<const double> values);

}  // namespace ghyp
