#include <doctest.h>

#include "ghyp/casestudy.hpp"
#include "ghyp/sampler.hpp"
#include "ghyp/validation.hpp"

using namespace ghyp;

namespace {

struct Masses {
  double empirical = 0;
  double beta = 0;
  double chi2 = 0;
  double empirical_mean = 0;
  double chi2_mean = 0;
  double beta_distance = 0;  // total variation between binned densities
  double chi2_distance = 0;
};

Masses integrate(const std::vector<HistogramRow>& rows) {
  Masses out;
  for (const auto& r : rows) {
    const double w = r.right - r.left;
    const double mid = 0.5 * (r.left + r.right);
    out.empirical += r.empirical_density * w;
    out.beta += r.beta_density * w;
    out.chi2 += r.chi2_density * w;
    out.empirical_mean += mid * r.empirical_density * w;
    out.chi2_mean += mid * r.chi2_density * w;
    out.beta_distance += 0.5 * std::abs(r.empirical_density - r.beta_density) * w;
    out.chi2_distance += 0.5 * std::abs(r.empirical_density - r.chi2_density) * w;
  }
  return out;
}

TestOptions zkc_options(ModelKind null_kind, ModelKind alt_kind) {
  TestOptions t;
  t.null_kind = null_kind;
  t.alt_kind = alt_kind;
  t.samples = 2000;
  t.seed = 7;
  return t;
}

}  // namespace

TEST_SUITE("validation") {

TEST_CASE("type-7 quantiles") {
  const std::vector<double> v{4, 1, 3, 2};
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 4.0);
  CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
  CHECK(quantile(v, 0.5) == doctest::Approx(2.5));
  CHECK(quantile(std::vector<double>{7}, 0.3) == 7.0);
}

TEST_CASE("karate club null histograms") {
  const auto zkc = load_zkc();
  const auto selection = null_distribution(zkc, zkc_options(ModelKind::regular, ModelKind::configuration));
  const auto sel = integrate(null_histogram(selection, 40));
  CHECK(sel.empirical == doctest::Approx(1.0).epsilon(0.01));
  CHECK(sel.beta == doctest::Approx(1.0).epsilon(0.01));
  CHECK(sel.chi2 == doctest::Approx(1.0).epsilon(0.01));
  // Both curves sit close to the histogram.
  CHECK(sel.beta_distance < 0.1);
  CHECK(sel.chi2_distance < 0.1);

  const auto gof = null_distribution(zkc, zkc_options(ModelKind::configuration, ModelKind::full));
  const auto fit = integrate(null_histogram(gof, 40));
  CHECK(fit.empirical == doctest::Approx(1.0).epsilon(0.01));
  CHECK(fit.beta == doctest::Approx(1.0).epsilon(0.01));
  CHECK(fit.chi2 == doctest::Approx(1.0).epsilon(0.01));
  // The chi2 curve is shifted right of the histogram.
  CHECK(fit.chi2_mean > fit.empirical_mean + 20);
  CHECK(fit.beta_distance < 0.1);
  CHECK(fit.chi2_distance > 0.3);
}

TEST_CASE("KS sweep shape and determinism") {
  const auto g = generate_geometric_cm_graph(12, 60, 3);
  TestOptions t;
  t.seed = 5;
  SweepOptions sweep;
  sweep.sizes = {100};
  sweep.reps = 4;
  sweep.reference = 500;
  const auto rows = ks_sweep(g, t, sweep);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].s == 100);
  CHECK(rows[0].q25_p <= rows[0].median_p);
  CHECK(rows[0].median_p <= rows[0].q75_p);
  const auto again = ks_sweep(g, t, sweep);
  CHECK(again[0].median_p == rows[0].median_p);
  CHECK(again[0].median_statistic == rows[0].median_statistic);
}

}
