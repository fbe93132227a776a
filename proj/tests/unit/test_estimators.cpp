// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "gmc/estimators.hpp"
#include "gmc/rng.hpp"

using namespace gmc;

TEST_SUITE("estimators") {
  TEST_CASE("structure function values") {
    CHECK(zeta(0.5, 1, 0.5) == doctest::Approx(0.5625));
    CHECK(zeta(1.0, 1, 0.5) == doctest::Approx(1.0));
    CHECK(zeta(2.0, 1, 0.5) == doctest::Approx(1.5));
    CHECK(zeta(3.0, 1, 0.5) == doctest::Approx(1.5));  // 3.75 - 0.25 * 9
    CHECK(p_star(1, 0.5) == doctest::Approx(4.0));
    CHECK(zeta(p_star(3, 1.7), 3, 1.7) == doctest::Approx(3.0));
    CHECK_THROWS_AS(p_star(1, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(p_star(1, 3.0), std::invalid_argument);
  }

  TEST_CASE("concavity and the value at one") {
    for (double l2 : {0.2, 1.0, 3.0})
      for (double p = 0.1; p < 4.0; p += 0.3) {
        CHECK(zeta(1.0, 2, l2) == doctest::Approx(2.0));
        CHECK(zeta(p + 0.1, 2, l2) - 2 * zeta(p, 2, l2) + zeta(p - 0.1, 2, l2) < 0.0);
      }
  }

  TEST_CASE("moment scaling recovers exponents from exact lognormal masses") {
    // m(c) = c^{d + l2/2} exp(sqrt(l2 ln(1/c)) Z) has E[m^p] = c^{zeta_p} exactly.
    const double l2 = 0.5;
    MomentSamples s;
    for (int k = 7; k >= 3; --k) s.c.push_back(std::ldexp(1.0, -k));
    Stream rng(1, 0, 0, StreamTag::oracle);
    for (double c : s.c) {
      std::vector<std::vector<double>> per(2000, std::vector<double>(4));
      for (auto& r : per)
        for (double& m : r) m = std::pow(c, 1.0 + l2 / 2) * std::exp(std::sqrt(l2 * std::log(1 / c)) * rng.normal());
      s.mass.push_back(per);
    }
    ScalingContext ctx;
    ctx.dimension = 1;
    ctx.lambda2 = l2;
    ctx.scale = 1.0;
    ctx.grid_step = 1e-4;
    const auto rep = moment_scaling(s, {0.5, 1.0, 2.0}, ctx);
    REQUIRE(rep.fits.size() == 3);
    for (const auto& f : rep.fits) {
      CAPTURE(f.p);
      CHECK(std::abs(f.zeta_hat - f.zeta_analytic) < 4.0 * f.se + 0.01);
      CHECK(f.zeta_analytic == doctest::Approx(zeta(f.p, 1, l2)));
    }
    CHECK(rep.concave);
    CHECK_FALSE(rep.range_ok);  // 1.2 decades is below the recommended span
    CHECK_THROWS_AS(moment_scaling(s, {4.5}, ctx), std::invalid_argument);
    ctx.grid_step = 0.01;
    CHECK_THROWS_AS(moment_scaling(s, {1.0}, ctx), std::invalid_argument);
  }

  TEST_CASE("scale invariance accepts an exact pair and rejects a shifted one") {
    KernelSpec k;
    k.lambda2 = 0.5;
    const double c = 0.5, l = std::log(2.0);
    Stream rng(2, 0, 0, StreamTag::oracle);
    std::vector<double> ref(3000), small(3000), shifted(3000);
    for (double& v : ref) v = -0.3 + 0.6 * rng.normal();
    for (std::size_t i = 0; i < small.size(); ++i) {
      const double base = -0.3 + 0.6 * rng.normal();
      const double omega = -(1.0 + 0.25) * l + std::sqrt(0.5 * l) * rng.normal();
      small[i] = base + omega;
      shifted[i] = small[i] + 0.2;
    }
    Stream perm(2, 0, 0, StreamTag::permutation);
    const auto ok = scale_invariance_test(k, c, small, ref, perm, 500);
    CHECK(ok.mean_target == doctest::Approx(-1.25 * l));
    CHECK(ok.variance_target == doctest::Approx(0.5 * l));
    CHECK(ok.pass());
    Stream perm2(2, 0, 0, StreamTag::permutation);
    const auto bad = scale_invariance_test(k, c, shifted, ref, perm2, 500);
    CHECK_FALSE(bad.mean_ok);
    k.remainder.kind = RemainderKind::constant;
    k.remainder.constant = 0.1;
    CHECK_THROWS_AS(scale_invariance_test(k, c, small, ref, perm), std::invalid_argument);
  }

  TEST_CASE("degeneracy verdicts on synthetic traces") {
    const std::vector<double> eps{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
    Stream rng(3, 0, 0, StreamTag::oracle);
    DegeneracyRun decaying{3.0, eps, {}}, flat{0.5, eps, {}};
    for (int r = 0; r < 400; ++r) {
      const double u = std::exp(0.3 * rng.normal());
      std::vector<double> a, b;
      for (double e : eps) {
        a.push_back(u * std::pow(e, 0.6));  // E[m^(1/2)] ~ eps^0.3
        b.push_back(u);
      }
      decaying.mass.push_back(a);
      flat.mass.push_back(b);
    }
    const auto rep = degeneracy_scan({decaying, flat}, 1, 0.5);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].exponent == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(rep.rows[0].verdict == "degenerate");
    CHECK(rep.rows[0].predicted == doctest::Approx(1.0 - zeta(0.5, 1, 3.0)));
    CHECK(rep.rows[1].verdict == "stable");
    CHECK(rep.rows[1].last_drift == doctest::Approx(0.0).scale(1.0));
  }

  TEST_CASE("lognormality report on exact lognormal dissipation") {
    // ln eps_l ~ N(-s2 / 2, s2) with s2 = ln(R / l) + 0.3.
    LognormalityInput in;
    in.scale = 1.0;
    Stream rng(4, 0, 0, StreamTag::oracle);
    for (int k = 1; k <= 4; ++k) {
      const double l = std::ldexp(1.0, -k);
      const double s2 = std::log(1.0 / l) + 0.3;
      in.l.push_back(l);
      std::vector<std::vector<double>> per(400, std::vector<double>(8));
      for (auto& r : per)
        for (double& v : r) v = std::exp(-0.5 * s2 + std::sqrt(s2) * rng.normal());
      in.value.push_back(per);
    }
    const auto rep = lognormality_report(in);
    CHECK(rep.slope == doctest::Approx(1.0).epsilon(0.1));
    CHECK(std::abs(rep.slope - 1.0) < 4 * rep.slope_se + 0.02);
    CHECK(rep.intercept == doctest::Approx(0.3).epsilon(0.5));
    for (const auto& row : rep.rows) CHECK(std::abs(row.mean - 1.0) < 4 * row.mean_se);
  }
}
