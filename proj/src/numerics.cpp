#include "ghyp/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ghyp/error.hpp"

namespace ghyp {

namespace {

// Gauss–Kronrod 15-point abscissae on [-1, 1] (non-negative half) and weights.
// Odd indices are also the 7-point Gauss nodes.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const std::function<double(double)>& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kKronrodWeights[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  kronrod *= half;
  gauss *= half;
  if (!std::isfinite(kronrod)) {
    throw DomainError("integrand is not finite on [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
  return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

void require(bool ok, const char* message) {
  if (!ok) throw DomainError(message);
}

}  // namespace

void QuadratureConfig::validate() const {
  require(relative_tolerance > 0.0 && absolute_tolerance > 0.0,
          "quadrature tolerances must be strictly positive");
  require(max_subdivisions >= 1, "max_subdivisions must be at least 1");
}

double log_gamma(double x) {
  require(x > 0.0, "log_gamma: argument must be positive");
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_binomial(double n, double k) {
  require(n >= 0.0 && k >= 0.0 && k <= n, "log_binomial: requires 0 <= k <= n");
  if (k == 0.0 || k == n) return 0.0;
  // Short integer products are more accurate than differences of large lgammas.
  const double small = std::min(k, n - k);
  if (small <= 32.0 && small == std::floor(small)) {
    const double big = n - small;
    double acc = 0.0;
    for (int i = 1; i <= static_cast<int>(small); ++i) acc += std::log((big + i) / i);
    return acc;
  }
  return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

double reg_inc_beta(double x, double a, double b) {
  require(x >= 0.0 && x <= 1.0 && a > 0.0 && b > 0.0, "reg_inc_beta: domain is x in [0,1], a,b > 0");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

double reg_inc_beta_complement(double x, double a, double b) {
  require(x >= 0.0 && x <= 1.0 && a > 0.0 && b > 0.0,
          "reg_inc_beta_complement: domain is x in [0,1], a,b > 0");
  if (x == 0.0) return 1.0;
  if (x == 1.0) return 0.0;
  return boost::math::ibetac(a, b, x);
}

double beta_pdf(double x, double a, double b) {
  require(a > 0.0 && b > 0.0, "beta_pdf: a, b must be positive");
  if (x < 0.0 || x > 1.0) return 0.0;
  if ((x == 0.0 && a < 1.0) || (x == 1.0 && b < 1.0)) return HUGE_VAL;
  return boost::math::ibeta_derivative(a, b, x);
}

double chi2_sf(double x, int dof) {
  require(x >= 0.0 && dof >= 1, "chi2_sf: requires x >= 0 and dof >= 1");
  if (x == 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

double chi2_cdf(double x, int dof) {
  require(x >= 0.0 && dof >= 1, "chi2_cdf: requires x >= 0 and dof >= 1");
  if (x == 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_pdf(double x, int dof) {
  require(dof >= 1, "chi2_pdf: dof must be >= 1");
  if (x < 0.0) return 0.0;
  if (x == 0.0) return dof == 2 ? 0.5 : (dof < 2 ? HUGE_VAL : 0.0);
  return 0.5 * boost::math::gamma_p_derivative(0.5 * dof, 0.5 * x);
}

double integrate_unit_interval(const std::function<double(double)>& integrand,
                               const QuadratureConfig& cfg) {
  cfg.validate();
  std::priority_queue<Segment> heap;
  Segment first = gauss_kronrod(integrand, 0.0, 1.0);
  double total = first.value;
  double total_error = first.error;
  heap.push(first);
  int subdivisions = 0;
  // Error below this is indistinguishable from roundoff in `total`.
  constexpr double kRoundoff = 50.0 * std::numeric_limits<double>::epsilon();
  while (total_error > std::max(cfg.absolute_tolerance, cfg.relative_tolerance * std::abs(total)) &&
         total_error > kRoundoff * std::abs(total)) {
    if (subdivisions >= cfg.max_subdivisions) {
      throw ConvergenceError("integrate_unit_interval: no convergence after " +
                             std::to_string(subdivisions) + " subdivisions (error estimate " +
                             std::to_string(total_error) + ")");
    }
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      // Cannot split further in double precision; accept as is.
      total_error -= worst.error;
      worst.error = 0.0;
      heap.push(worst);
      continue;
    }
    Segment left = gauss_kronrod(integrand, worst.lo, mid);
    Segment right = gauss_kronrod(integrand, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }
  // Re-sum to shed accumulated update drift.
  double sum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    heap.pop();
  }
  return sum;
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  constexpr int kTerms = 100;
  if (lambda < 1.18) {
    // Jacobi-theta form of the CDF converges fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf = 0.0;
    for (int k = 1; k <= kTerms; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
      cdf += term;
      if (term < 1e-300) break;
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sf = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= kTerms; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sf += sign * term;
    if (term < 1e-300) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sf, 0.0, 1.0);
}

KSReport ks_test(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("ks_test: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = std::clamp(cdf(sorted[i]), 0.0, 1.0);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    sup = std::max({sup, above, below});
  }
  return {sup, kolmogorov_sf(std::sqrt(n) * sup), sorted.size()};
}

double mean(std::span<const double> values) {
  if (values.empty()) throw DomainError("mean: empty sequence");
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) throw DomainError("sample_variance: need at least two values");
  const double mu = mean(values);
  double acc = 0.0;
  for (double v : values) acc += (v - mu) * (v - mu);
  return acc / static_cast<double>(values.size() - 1);
}

double sample_skewness(std::span<const double> values) {
  if (values.size() < 3) throw DomainError("sample_skewness: need at least three values");
  const double mu = mean(values);
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : values) {
    const double d = v - mu;
    m2 += d * d;
    m3 += d * d * d;
  }
  const auto n = static_cast<double>(values.size());
  m2 /= n;
  m3 /= n;
  if (m2 <= 0.0) throw DomainError("sample_skewness: zero variance");
  return m3 / std::pow(m2, 1.5);
}

}  // namespace ghyp
