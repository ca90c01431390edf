#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ghyp/error.hpp"
#include "ghyp/numerics.hpp"
#include "oracles.hpp"

using namespace ghyp;

TEST_SUITE("numerics") {

TEST_CASE("log_binomial small and exact cases") {
  CHECK(log_binomial(4, 2) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
  CHECK(log_binomial(0, 0) == 0.0);
  CHECK(log_binomial(17, 0) == 0.0);
  // 52*51*50*49*48 / 120
  CHECK(log_binomial(52, 5) == doctest::Approx(std::log(2598960.0)).epsilon(1e-14));
  // Non-integer arguments go through log-gamma.
  CHECK(log_binomial(95.117, 3.5) == doctest::Approx(oracle::log_choose(95.117, 3.5)).epsilon(1e-12));
  CHECK_THROWS_AS(log_binomial(3, 4), DomainError);
}

TEST_CASE("regularized incomplete beta") {
  CHECK(reg_inc_beta(0.0, 2.5, 3.0) == 0.0);
  CHECK(reg_inc_beta(1.0, 2.5, 3.0) == 1.0);
  for (double x : {0.1, 0.37, 0.9}) CHECK(reg_inc_beta(x, 1, 1) == doctest::Approx(x).epsilon(1e-14));
  CHECK(reg_inc_beta(0.5, 2, 2) == doctest::Approx(0.5).epsilon(1e-14));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  std::uniform_real_distribution<double> ua(0.05, 400.0);
  for (int i = 0; i < 500; ++i) {
    const double x = ux(rng);
    const double a = ua(rng);
    const double b = ua(rng);
    CHECK(std::abs(reg_inc_beta(x, a, b) + reg_inc_beta(1.0 - x, b, a) - 1.0) < 1e-12);
    CHECK(std::abs(reg_inc_beta(x, a, b) + reg_inc_beta_complement(x, a, b) - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(reg_inc_beta(0.5, 0.0, 1.0), DomainError);
}

TEST_CASE("chi-square survival function") {
  CHECK(chi2_sf(0.0, 3) == 1.0);
  CHECK(chi2_sf(2.0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(chi2_sf(5.991, 2) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(std::abs(chi2_sf(5.991, 2) - oracle::chi2_sf_simpson(5.991, 2)) < 1e-8);
  for (int nu = 1; nu <= 10; ++nu) {
    for (double x = 0.0; x <= 50.0; x += 2.5) {
      CAPTURE(nu);
      CAPTURE(x);
      CHECK(std::abs(chi2_sf(x, nu) - oracle::chi2_sf_simpson(x, nu)) < 1e-8);
    }
  }
  CHECK(chi2_sf(3.0, 4) + chi2_cdf(3.0, 4) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("unit-interval quadrature") {
  QuadratureConfig cfg;
  CHECK(integrate_unit_interval([](double z) { return z; }, cfg) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(integrate_unit_interval([](double z) { return std::pow(1 - z, 3); }, cfg) ==
        doctest::Approx(0.25).epsilon(1e-14));

  // (1 - z^2)^5 expanded binomially.
  double expanded = 0.0;
  const double c5[] = {1, 5, 10, 10, 5, 1};
  for (int k = 0; k <= 5; ++k) expanded += (k % 2 ? -1.0 : 1.0) * c5[k] / (2 * k + 1);
  CHECK(expanded == doctest::Approx(256.0 / 693.0).epsilon(1e-14));
  CHECK(integrate_unit_interval([](double z) { return std::pow(1 - z * z, 5); }, cfg) ==
        doctest::Approx(expanded).epsilon(1e-12));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  for (int degree = 0; degree <= 20; ++degree) {
    std::vector<double> c(degree + 1);
    double exact = 0.0;
    for (int k = 0; k <= degree; ++k) {
      c[k] = coef(rng);
      exact += c[k] / (k + 1);
    }
    auto poly = [&](double z) {
      double v = 0.0;
      for (int k = degree; k >= 0; --k) v = v * z + c[k];
      return v;
    };
    CAPTURE(degree);
    CHECK(std::abs(integrate_unit_interval(poly, cfg) - exact) <=
          cfg.relative_tolerance * std::abs(exact) + cfg.absolute_tolerance);
  }
}

TEST_CASE("quadrature reports exhaustion and bad config") {
  QuadratureConfig tight;
  tight.relative_tolerance = 1e-15;
  tight.absolute_tolerance = 1e-300;
  tight.max_subdivisions = 2;
  CHECK_THROWS_AS(integrate_unit_interval([](double z) { return std::sin(200 * z); }, tight), ConvergenceError);
  QuadratureConfig bad;
  bad.relative_tolerance = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("Kolmogorov-Smirnov test") {
  const auto uniform_cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  std::vector<double> quantiles;
  for (int i = 1; i <= 200; ++i) quantiles.push_back(i / 201.0);
  const auto even = ks_test(quantiles, uniform_cdf);
  CHECK(even.statistic < 0.01);
  CHECK(even.p_value > 0.99);

  const std::vector<double> constant(50, 0.3);
  CHECK(ks_test(constant, uniform_cdf).statistic == doctest::Approx(0.7).epsilon(1e-12));

  // Joint monotone transform leaves the statistic unchanged.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> xs(300);
  for (auto& x : xs) x = u(rng);
  std::vector<double> ys;
  for (double x : xs) ys.push_back(std::exp(3 * x));
  const auto a = ks_test(xs, uniform_cdf);
  const auto b = ks_test(ys, [&](double y) { return uniform_cdf(std::log(y) / 3); });
  CHECK(a.statistic == doctest::Approx(b.statistic).epsilon(1e-12));
  CHECK(a.p_value >= 0.0);
  CHECK(a.p_value <= 1.0);
}

TEST_CASE("KS p-values of uniform draws are themselves uniform") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto identity = [](double x) { return x; };
  std::vector<double> pvalues;
  std::vector<double> draws(10000);
  for (int rep = 0; rep < 300; ++rep) {
    for (auto& d : draws) d = u(rng);
    pvalues.push_back(ks_test(draws, identity).p_value);
  }
  CHECK(ks_test(pvalues, identity).p_value > 0.001);
}

TEST_CASE("kolmogorov_sf branches agree at the switch point") {
  CHECK(kolmogorov_sf(0.0) == 1.0);
  CHECK(kolmogorov_sf(1.18 - 1e-9) == doctest::Approx(kolmogorov_sf(1.18 + 1e-9)).epsilon(1e-7));
  CHECK(kolmogorov_sf(1.358) == doctest::Approx(0.05).epsilon(2e-3));
}

TEST_CASE("moments and skewness") {
  const std::vector<double> sym{1, 2, 3};
  CHECK(sample_skewness(sym) == doctest::Approx(0.0));
  // mean 1/4, m2 = 3/16, m3 = 3/32, g1 = 2/sqrt(3)
  const std::vector<double> spike{0, 0, 0, 1};
  CHECK(sample_skewness(spike) == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(sample_variance(sym) == doctest::Approx(1.0));
  CHECK_THROWS_AS(sample_skewness(std::vector<double>{2, 2, 2}), DomainError);
  CHECK_THROWS_AS(mean(std::vector<double>{}), DomainError);
}

}
