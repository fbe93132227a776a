// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "gmc/kernels.hpp"
#include "gmc/special.hpp"
#include "gmc/spectral.hpp"

using namespace gmc;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double pi = special::pi;

double gk(const std::function<double(double)>& f, double a, double b) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

// Fourier cosine transform in d = 1 by brute force over [-X, X].
double cosine_transform(const std::function<double(double)>& f, double s, double X) {
  // Fixed 61-point panels of width 0.1; the integrand is smooth on each.
  double sum = 0.0;
  const int panels = static_cast<int>(X * 10);
  for (int i = 0; i < panels; ++i) {
    const double a = X * i / panels, b = X * (i + 1) / panels;
    sum += gauss_kronrod<double, 61>::integrate([&](double x) { return f(x) * std::cos(2 * pi * s * x); }, a, b, 0);
  }
  return 2.0 * sum;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("validation rejects unsupported dimensions and the critical intermittency") {
    KernelSpec k;
    k.dimension = 4;
    CHECK_THROWS_AS(k.validate(), std::invalid_argument);
    for (int d = 1; d <= 3; ++d) {
      k.dimension = d;
      k.lambda2 = 2.0 * d;
      CHECK_THROWS_AS(k.validate(), std::invalid_argument);
      k.lambda2 = 2.0 * d + 0.1;
      CHECK_NOTHROW(k.validate());
    }
    k.lambda2 = -1;
    CHECK_THROWS_AS(k.validate(), std::invalid_argument);
  }

  TEST_CASE("log+ kernel values and the tagged singularity") {
    KernelSpec k;
    k.lambda2 = 0.7;
    k.scale = 2.0;
    CHECK(eval_kernel(k, 0.0).singular);
    CHECK(eval_kernel(k, 0.5).value == doctest::Approx(0.7 * std::log(4.0)));
    CHECK(eval_kernel(k, 3.0).value == 0.0);
    k.remainder.kind = RemainderKind::constant;
    k.remainder.constant = 0.25;
    CHECK(eval_kernel(k, 0.5).value == doctest::Approx(0.7 * std::log(4.0) + 0.25));
  }

  TEST_CASE("lens volume matches a brute-force count") {
    // d = 2, two discs of radius a at distance r, counted on a fine lattice.
    const double a = 0.5, r = 0.3;
    const int n = 2000;
    const double h = 2.0 * a / n;
    long inside = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double x = -a + (i + 0.5) * h, y = -a + (j + 0.5) * h;
        if (x * x + y * y <= a * a && (x - r) * (x - r) + y * y <= a * a) ++inside;
      }
    CHECK(lens_volume(2, r, a) == doctest::Approx(inside * h * h).epsilon(2e-3));
    CHECK(lens_volume(3, 0.0, a) == doctest::Approx(4.0 / 3.0 * pi * a * a * a));
    CHECK(lens_volume(1, 0.4, a) == doctest::Approx(0.6));
  }

  TEST_CASE("cone kernel has the exact log coefficient") {
    // Hand-integrated: the cone construction gives lambda^2 (ln(T/r) - 1 + r/T)
    // in d = 3 and lambda^2 ln(T/r) in d = 1.
    const double T = 1.5;
    for (double r : {1e-4, 0.01, 0.3, 1.0, 1.49}) {
      CAPTURE(r);
      CHECK(eval_cone_kernel(1.0, T, 1, r).value == doctest::Approx(std::log(T / r)).epsilon(1e-12));
      CHECK(eval_cone_kernel(2.0, T, 3, r).value ==
            doctest::Approx(2.0 * (std::log(T / r) - 1.0 + r / T)).epsilon(1e-9));
    }
  }

  TEST_CASE("cone kernel in d = 2 matches a direct t-integral") {
    const double T = 1.0, r = 0.2;
    const double c = pi / 4.0;
    const double body = gk([&](double t) { return lens_volume(2, r, 0.5 * t) / std::pow(t, 3); }, r, T);
    const double cap = lens_volume(2, r, 0.5 * T) / (2.0 * T * T);
    CHECK(eval_cone_kernel(1.0, T, 2, r).value == doctest::Approx((body + cap) / c).epsilon(1e-9));
    // The remainder stays bounded as r -> 0.
    CHECK(std::abs(cone_remainder(2, T, 1e-6) - cone_remainder(2, T, 1e-5)) < 1e-3);
  }

  TEST_CASE("cone spectrum is nonnegative") {
    for (int d = 1; d <= 3; ++d)
      for (double xi : {0.01, 0.3, 1.0, 2.7, 10.0, 40.0}) CHECK(cone_kernel_hat(1.0, 1.0, d, xi).value >= 0.0);
  }

  TEST_CASE("sigma-positive layers sum to the log+ kernel") {
    const double T = 2.0;
    for (int d : {1, 2}) {
      for (double r : {0.01, 0.5, 1.9}) {
        double sum = 0.0;
        const double mu = d == 1 ? 1.0 : 0.5;
        const int top = static_cast<int>(std::ceil(std::pow(T / r, mu))) + 2;
        for (int n = 1; n <= top; ++n) {
          const double f = sigma_positive_layer(n, d, T, r);
          CHECK(f >= 0.0);
          sum += f;
        }
        CAPTURE(d);
        CAPTURE(r);
        CHECK(sum == doctest::Approx(std::log(T / r)).epsilon(1e-12));
      }
      CHECK(sigma_positive_layer(3, d, T, 2.5) == 0.0);
    }
  }

  TEST_CASE("mollifier transforms match direct quadrature in d = 1") {
    auto gauss = [](double x) { return mollifier_profile(MollifierKind::gaussian, 1, std::abs(x)); };
    auto fejer = [](double x) { return mollifier_profile(MollifierKind::fejer, 1, std::abs(x)); };
    for (double s : {0.0, 0.1, 0.35, 0.8}) {
      CAPTURE(s);
      CHECK(mollifier_hat(MollifierKind::gaussian, s, 1) == doctest::Approx(cosine_transform(gauss, s, 12.0)).epsilon(1e-10));
      CHECK(mollifier_hat(MollifierKind::fejer, s, 1) ==
            doctest::Approx(cosine_transform(fejer, s, 400.0)).epsilon(3e-3).scale(1.0));
    }
    CHECK(mollifier_hat(MollifierKind::fejer, 1.2, 1) == 0.0);
  }

  TEST_CASE("mollifier decay bound holds on a dense scan") {
    for (auto kind : {MollifierKind::gaussian, MollifierKind::fejer})
      for (int d = 1; d <= 3; ++d) {
        const auto b = mollifier_decay(kind, d);
        for (double r = 0.0; r < 300.0; r += 0.137)
          CHECK(std::abs(mollifier_profile(kind, d, r)) * (1.0 + std::pow(r, d + b.gamma)) <= b.C);
      }
  }

  TEST_CASE("mollified covariance agrees with the real-space convolution") {
    KernelSpec k;
    k.lambda2 = 1.0;
    k.scale = 1.0;
    MollifierSpec m{MollifierKind::gaussian, 0.05};
    for (double r : {0.0, 0.02, 0.3, 0.98}) {
      // q(r) = int theta_eps(y) ln+(1 / |r - y|) dy; split at the singularity
      // and at the edges of the log+ support.
      auto f = [&](double y) {
        const double g = std::exp(-0.5 * y * y / (m.epsilon * m.epsilon)) / (std::sqrt(2 * pi) * m.epsilon);
        const double dist = std::abs(r - y);
        return dist >= 1.0 ? 0.0 : g * std::log(1.0 / dist);
      };
      boost::math::quadrature::tanh_sinh<double> ts;
      const double lo = std::max(r - 1.0, -1.0), hi = std::min(r + 1.0, 1.0);
      double ref = ts.integrate(f, lo, r) + ts.integrate(f, r, hi);
      CAPTURE(r);
      CHECK(mollified_covariance(k, m, r).value == doctest::Approx(ref).epsilon(1e-7));
    }
  }
}

TEST_SUITE("spectral") {
  TEST_CASE("closed-form transform in d = 1 equals Si over pi xi") {
    const double T = 1.3;
    for (double xi : {0.01, 0.5, 3.0, 47.0}) {
      // 2 int_0^T ln(T/x) cos(2 pi xi x) dx, by tanh-sinh (log endpoint)
      boost::math::quadrature::tanh_sinh<double> ts;
      const double ref = 2.0 * ts.integrate([&](double x) { return std::log(T / x) * std::cos(2 * pi * xi * x); }, 0.0, T);
      CAPTURE(xi);
      CHECK(logplus_hat_1d(xi, T) == doctest::Approx(ref).epsilon(1e-8).scale(1e-3));
      CHECK(logplus_hat_1d(xi, T) == doctest::Approx(special::sine_integral(2 * pi * xi * T) / (pi * xi)).epsilon(1e-12));
    }
  }

  TEST_CASE("closed forms agree with the general radial transform") {
    const double T = 1.0;
    for (int d = 1; d <= 4; ++d)
      for (double xi : {0.05, 0.7, 3.3, 19.0}) {
        const auto q = radial_fourier(logplus_profile(T), d, xi);
        CAPTURE(d);
        CAPTURE(xi);
        CHECK(q.value == doctest::Approx(logplus_hat(d, xi, T)).epsilon(1e-8).scale(1e-4));
      }
    // Gaussian profile in d = 3: (2 pi)^{3/2} exp(-2 pi^2 xi^2).
    const auto g = radial_fourier(gaussian_profile(), 3, 0.4);
    CHECK(g.value == doctest::Approx(std::pow(2 * pi, 1.5) * std::exp(-2 * pi * pi * 0.16)).epsilon(1e-9));
  }

  TEST_CASE("certificates separate d <= 3 from d = 4") {
    const double T = 1.0;
    for (int d = 1; d <= 3; ++d) {
      const auto p = check_positive_definite(logplus_profile(T), d, certificate_grid(T), T);
      CAPTURE(d);
      CHECK(p.certificate == Certificate::nonnegative_on_grid);
      CHECK(p.negative_points == 0);
    }
    const auto p4 = check_positive_definite(logplus_profile(T), 4, certificate_grid(T), T);
    CHECK(p4.certificate == Certificate::sign_oscillating);
    CHECK(p4.negative_points > 0);
  }

  TEST_CASE("the resolution rule refuses coarse grids") {
    std::vector<double> coarse;
    for (int i = 0; i <= 20; ++i) coarse.push_back(std::pow(10.0, -2.0 + 0.2 * i));
    CHECK_THROWS_AS(require_resolution(coarse, 1.0), GridTooCoarse);
    CHECK_NOTHROW(require_resolution(certificate_grid(1.0), 1.0));
  }
}
