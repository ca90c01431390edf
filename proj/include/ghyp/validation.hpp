#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ghyp/lrtest.hpp"

namespace ghyp {

// Linear-interpolation quantile (R type 7) of unsorted values.
double quantile(std::span<const double> values, double q);

struct SweepOptions {
  std::vector<std::size_t> sizes{250, 500, 1000, 2000};
  std::size_t reps = 50;
  std::size_t reference = 20000;
};

struct SweepRow {
  std::size_t s = 0;
  double median_p = 0.0;
  double q25_p = 0.0;
  double q75_p = 0.0;
  double median_statistic = 0.0;
};

// For every size s: `reps` times fit the scaled Beta on s fresh null samples
// and KS-test a fixed reference set of null samples against it.
std::vector<SweepRow> ks_sweep(const MultiGraph& g, const TestOptions& opts, const SweepOptions& sweep);

struct HistogramRow {
  double left = 0.0;
  double right = 0.0;
  double empirical_density = 0.0;
  double beta_density = 0.0;  // bin-averaged
  double chi2_density = 0.0;  // bin-averaged
};

// Histogram over [0, upper] where upper covers the samples and the 99.95%
// quantiles of both fitted curves.
std::vector<HistogramRow> null_histogram(const NullDistribution& nd, std::size_t bins);

}  // namespace ghyp
