// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "gmc/quadrature.hpp"
#include "gmc/rng.hpp"
#include "gmc/special.hpp"

using namespace gmc;

namespace {

// Si and Ci from Boost quadrature, independent of the library's series.
double si_reference(double x) {
  auto f = [](double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, x, 15, 1e-14);
}

double ci_reference(double x) {
  auto f = [](double t) { return t == 0.0 ? 0.0 : (std::cos(t) - 1.0) / t; };
  return special::euler_gamma + std::log(x) +
         boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, x, 15, 1e-14);
}

}  // namespace

TEST_SUITE("special") {
  TEST_CASE("bessel_j agrees with boost across all branches") {
    for (double nu : {-0.5, 0.0, 0.5, 1.0, 1.5, 2.0}) {
      for (double x : {0.0, 1e-6, 0.3, 1.0, 4.0, 7.9, 8.1, 12.0, 24.0, 26.0, 60.0, 400.0}) {
        if (nu < 0 && x == 0.0) continue;
        const double ref = boost::math::cyl_bessel_j(nu, x);
        CAPTURE(nu);
        CAPTURE(x);
        CHECK(special::bessel_j(nu, x) == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
      }
    }
  }

  TEST_CASE("sine and cosine integrals match quadrature") {
    for (double x : {1e-3, 0.5, 1.0, 3.0, 10.0, 25.0, 60.0}) {
      CAPTURE(x);
      CHECK(special::sine_integral(x) == doctest::Approx(si_reference(x)).epsilon(1e-11));
      CHECK(special::cosine_integral(x) == doctest::Approx(ci_reference(x)).epsilon(1e-10).scale(1.0));
    }
    // Tabulated values.
    CHECK(special::sine_integral(1.0) == doctest::Approx(0.946083070367183).epsilon(1e-13));
    CHECK(special::cosine_integral(1.0) == doctest::Approx(0.337403922900968).epsilon(1e-13));
    CHECK(special::sine_integral(1e4) == doctest::Approx(special::pi / 2).epsilon(1e-4));
  }

  TEST_CASE("si_minus_sin keeps relative accuracy near zero") {
    for (double x : {1e-4, 1e-2, 0.1, 0.5, 2.0}) {
      // Si(x) - sin(x) = x^3/3! - x^3/18 + ... = x^3 / 9 - ..., compared to the series directly
      double series = 0.0, term = x;
      for (int k = 0; k < 30; ++k) {
        // Si = sum (-1)^k x^{2k+1} / ((2k+1)(2k+1)!), sin = sum (-1)^k x^{2k+1} / (2k+1)!
        series += term * (1.0 / (2 * k + 1) - 1.0);
        term *= -x * x / ((2 * k + 2) * (2 * k + 3));
      }
      CHECK(special::si_minus_sin(x) == doctest::Approx(series).epsilon(1e-12));
    }
  }

  TEST_CASE("gauss_hermite integrates normal moments exactly") {
    const auto rule = special::gauss_hermite(20);
    double m0 = 0, m2 = 0, m4 = 0, m6 = 0, m3 = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = rule.nodes[i], w = rule.weights[i];
      m0 += w;
      m2 += w * x * x;
      m3 += w * x * x * x;
      m4 += w * std::pow(x, 4);
      m6 += w * std::pow(x, 6);
    }
    CHECK(m0 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m2 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(m3) < 1e-13);
    CHECK(m4 == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(m6 == doctest::Approx(15.0).epsilon(1e-12));
    double e = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) e += rule.weights[i] * std::exp(rule.nodes[i]);
    CHECK(e == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
  }
}

TEST_SUITE("quadrature") {
  TEST_CASE("gauss-kronrod panel is exact on polynomials") {
    const auto r = gauss_kronrod_panel([](double x) { return std::pow(x, 20) - 3 * x * x; }, -1.0, 2.0);
    const double exact = (std::pow(2.0, 21) + 1.0) / 21.0 - (8.0 + 1.0);
    CHECK(r.value == doctest::Approx(exact).epsilon(1e-14));
  }

  TEST_CASE("adaptive integration handles endpoint singularities") {
    const auto r = integrate([](double x) { return std::log(x); }, 0.0, 1.0, {1e-12, 1e-12, 5000});
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-10));
    const auto s = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 4.0, {1e-10, 1e-10, 5000});
    CHECK(s.value == doctest::Approx(4.0).epsilon(1e-8));
  }

  TEST_CASE("breakpoints resolve a kink") {
    const auto r = integrate_panels([](double x) { return std::abs(x - 0.3); }, {0.0, 0.3, 1.0});
    CHECK(r.value == doctest::Approx(0.5 * 0.09 + 0.5 * 0.49).epsilon(1e-14));
  }
}

TEST_SUITE("rng") {
  // Known-answer vectors published with the Random123 reference implementation.
  TEST_CASE("philox4x32-10 known answers") {
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  }

  TEST_CASE("streams are reproducible and distinct") {
    Stream a(42, 3, 1, StreamTag::field), b(42, 3, 1, StreamTag::field);
    Stream c(42, 4, 1, StreamTag::field), d(42, 3, 2, StreamTag::field), e(42, 3, 1, StreamTag::brownian);
    const double x = a.normal();
    CHECK(x == b.normal());
    CHECK(x != c.normal());
    CHECK(x != d.normal());
    CHECK(x != e.normal());
  }

  TEST_CASE("normal variates have unit variance") {
    Stream s(9, 0, 0, StreamTag::oracle);
    const int n = 200000;
    double m1 = 0, m2 = 0;
    for (int i = 0; i < n; ++i) {
      const double z = s.normal();
      m1 += z;
      m2 += z * z;
    }
    m1 /= n;
    m2 /= n;
    CHECK(std::abs(m1) < 5.0 / std::sqrt(n));
    CHECK(std::abs(m2 - 1.0) < 5.0 * std::sqrt(2.0 / n));
  }

  TEST_CASE("below is uniform on small ranges") {
    Stream s(1, 0, 0, StreamTag::permutation);
    int counts[7] = {};
    const int n = 70000;
    for (int i = 0; i < n; ++i) ++counts[s.below(7)];
    double chi2 = 0;
    for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
    CHECK(chi2 < 22.5);  // 6 dof, p = 0.001
  }
}
