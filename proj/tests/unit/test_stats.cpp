// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "gmc/rng.hpp"
#include "gmc/stats.hpp"

using namespace gmc;

TEST_SUITE("stats") {
  TEST_CASE("basic reductions") {
    const std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
    CHECK(stats::mean(x) == 5.0);
    CHECK(stats::variance(x) == doctest::Approx(32.0 / 7.0));
    CHECK(stats::standard_error(x) == doctest::Approx(std::sqrt(32.0 / 7.0 / 8.0)));
    CHECK(stats::median(x) == 4.5);
    CHECK(stats::quantile(x, 0.0) == 2.0);
    CHECK(stats::quantile(x, 1.0) == 9.0);
  }

  TEST_CASE("moments of a normal sample") {
    Stream s(3, 0, 0, StreamTag::oracle);
    std::vector<double> x(100000);
    for (double& v : x) v = 2.0 + 3.0 * s.normal();
    const auto m = stats::moments(x);
    CHECK(m.mean == doctest::Approx(2.0).epsilon(0.02));
    CHECK(m.variance == doctest::Approx(9.0).epsilon(0.02));
    CHECK(std::abs(m.skewness) < 0.04);
    CHECK(std::abs(m.excess_kurtosis) < 0.08);
    // Var(s^2) = 2 sigma^4 / (n - 1) for normal data.
    CHECK(stats::variance_standard_error(x) == doctest::Approx(std::sqrt(2.0 * 81.0 / 1e5)).epsilon(0.05));
  }

  TEST_CASE("line fits recover exact lines") {
    const std::vector<double> x{0, 1, 2, 3, 4};
    std::vector<double> y;
    for (double v : x) y.push_back(1.5 - 0.25 * v);
    const auto f = stats::ols(x, y);
    CHECK(f.slope == doctest::Approx(-0.25));
    CHECK(f.intercept == doctest::Approx(1.5));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(f.slope_se == doctest::Approx(0.0).scale(1.0));
    const auto w = stats::wls(x, y, {1, 2, 3, 4, 5});
    CHECK(w.slope == doctest::Approx(-0.25));
  }

  TEST_CASE("jackknife of the mean equals the standard error") {
    Stream s(4, 0, 0, StreamTag::oracle);
    std::vector<double> x(50);
    for (double& v : x) v = s.normal();
    const auto jk = stats::jackknife(50, [&](const std::vector<bool>& keep) {
      double sum = 0;
      int n = 0;
      for (int i = 0; i < 50; ++i)
        if (keep[i]) sum += x[i], ++n;
      return sum / n;
    });
    CHECK(jk.estimate == doctest::Approx(stats::mean(x)));
    CHECK(jk.standard_error == doctest::Approx(stats::standard_error(x)).epsilon(1e-10));
  }

  TEST_CASE("kolmogorov-smirnov statistic and its permutation critical value") {
    CHECK(stats::ks_statistic({1, 2, 3}, {4, 5, 6}) == 1.0);
    CHECK(stats::ks_statistic({1, 2, 3, 4}, {1, 2, 3, 4}) == 0.0);
    CHECK(stats::ks_statistic({1, 3}, {2, 4}) == doctest::Approx(0.5));
    Stream s(5, 0, 0, StreamTag::permutation);
    std::vector<double> a(400), b(400);
    for (double& v : a) v = s.normal();
    for (double& v : b) v = s.normal();
    Stream perm(5, 0, 0, StreamTag::permutation);
    const double crit = stats::ks_permutation_critical(a, b, 0.05, 2000, perm);
    // Asymptotic two-sample value 1.358 sqrt((n + m) / (n m)).
    CHECK(crit == doctest::Approx(1.358 * std::sqrt(2.0 / 400)).epsilon(0.1));
  }
}
