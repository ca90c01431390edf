#include "ghyp/validation.hpp"

#include <algorithm>
#include <cmath>

#include "ghyp/error.hpp"
#include "ghyp/sampler.hpp"

namespace ghyp {

namespace {

// Smallest x in [0, hi] with cdf(x) >= q, by bisection.
template <class Cdf>
double invert_cdf(Cdf cdf, double q, double hi) {
  while (cdf(hi) < q) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw DomainError("quantile: empty sequence");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<SweepRow> ks_sweep(const MultiGraph& g, const TestOptions& opts, const SweepOptions& sweep) {
  if (sweep.sizes.empty()) throw DomainError("ks_sweep: no sample sizes given");
  if (sweep.reps < 1) throw DomainError("ks_sweep: reps must be >= 1");
  for (auto s : sweep.sizes) {
    if (s < kMinSamples) throw StatisticalError("ks_sweep: sample sizes must be >= 30");
  }
  require_nested(opts.null_kind, opts.alt_kind);
  const ModelSpec null_model = fit_model(opts.null_kind, g, opts.partition);
  const double bound = estimate_M(null_model, g);
  std::size_t dropped = 0;
  const auto reference =
      null_statistics(null_model, g, opts, sweep.reference, derive_seed(opts.seed, 0), dropped);
  std::vector<SweepRow> rows;
  std::uint64_t stream = 1;
  for (const auto s : sweep.sizes) {
    std::vector<double> p_values;
    std::vector<double> statistics;
    for (std::size_t r = 0; r < sweep.reps; ++r) {
      const auto fresh = null_statistics(null_model, g, opts, s, derive_seed(opts.seed, stream++), dropped);
      const double largest = *std::max_element(fresh.begin(), fresh.end());
      const BetaNull fitted = fit_beta_null(fresh, largest > bound ? 1.05 * largest : bound);
      const KSReport ks = ks_test(reference, [&](double d) { return fitted.cdf(d); });
      p_values.push_back(ks.p_value);
      statistics.push_back(ks.statistic);
    }
    rows.push_back({s, quantile(p_values, 0.5), quantile(p_values, 0.25), quantile(p_values, 0.75),
                    quantile(statistics, 0.5)});
  }
  return rows;
}

std::vector<HistogramRow> null_histogram(const NullDistribution& nd, std::size_t bins) {
  if (bins < 1) throw DomainError("null_histogram: need at least one bin");
  if (nd.samples.empty()) throw StatisticalError("null_histogram: empty null distribution");
  const auto chi2 = [&](double d) { return d <= 0.0 ? 0.0 : chi2_cdf(d, std::max(nd.nu, 1)); };
  const auto beta = [&](double d) { return nd.beta.cdf(d); };
  double upper = *std::max_element(nd.samples.begin(), nd.samples.end());
  upper = std::max(upper, invert_cdf(chi2, 0.9995, std::max(1.0, upper)));
  upper = std::max(upper, invert_cdf(beta, 0.9995, std::max(1.0, upper)));
  const double width = upper / static_cast<double>(bins);
  std::vector<HistogramRow> rows(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    rows[b].left = width * static_cast<double>(b);
    rows[b].right = b + 1 == bins ? upper : width * static_cast<double>(b + 1);
  }
  for (double d : nd.samples) {
    const auto b = std::min(bins - 1, static_cast<std::size_t>(d / width));
    rows[b].empirical_density += 1.0;
  }
  const auto n = static_cast<double>(nd.samples.size());
  for (auto& row : rows) {
    const double w = row.right - row.left;
    row.empirical_density /= n * w;
    row.beta_density = (beta(row.right) - beta(row.left)) / w;
    row.chi2_density = (chi2(row.right) - chi2(row.left)) / w;
  }
  return rows;
}

}  // namespace ghyp
