// SPDX-License-Identifier: Apache-2.0
#include "gmc/special.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace gmc::special {
namespace {

bool is_half_integer(double nu) {
  const double twice = 2.0 * nu;
  return std::abs(twice - std::round(twice)) < 1e-14 &&
         static_cast<long>(std::round(twice)) % 2 != 0;
}

double bessel_series(double nu, double x) {
  const double q = 0.25 * x * x;
  double term = std::exp(nu * std::log(0.5 * x) - std::lgamma(nu + 1.0));
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= -q / (k * (k + nu));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) && k > 0.5 * x) break;
  }
  return sum;
}

double bessel_hankel(double nu, double x) {
  const double mu4 = 4.0 * nu * nu;
  double p = 1.0;
  double q = 0.0;
  double a = 1.0;
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= (mu4 - odd * odd) / (k * 8.0 * x);
    if (a == 0.0 || std::abs(a) > previous) break;
    previous = std::abs(a);
    switch (k % 4) {
      case 1: q += a; break;
      case 2: p -= a; break;
      case 3: q -= a; break;
      default: p += a; break;
    }
    if (std::abs(a) < 1e-17) break;
  }
  const double chi = x - (0.5 * nu + 0.25) * pi;
  return std::sqrt(2.0 / (pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

// Miller's algorithm: backward recurrence from a high order, normalised with
// the Neumann sum (x/2)^mu = sum_k (mu+2k) Gamma(mu+k)/k! J_{mu+2k}(x).
double bessel_miller(double nu, double x) {
  const int n = static_cast<int>(std::floor(nu));
  const double mu = nu - n;
  const double top = std::max(static_cast<double>(n), x);
  int start = static_cast<int>(top + 20.0 + std::sqrt(60.0 * top));
  start += start % 2;

  // Neumann coefficients c_k for k = 0 .. start/2.
  const bool integer = mu < 1e-15;
  double g = std::tgamma(mu + 1.0);  // Gamma(mu+k)/k! for k = 1
  std::vector<double> coeff(start / 2 + 1);
  coeff[0] = integer ? 1.0 : g;
  for (int k = 1; k <= start / 2; ++k) {
    coeff[k] = integer ? 2.0 : (mu + 2.0 * k) * g;
    g *= (mu + k) / (k + 1.0);
  }

  double upper = 0.0;
  double current = 1e-300;
  double target = 0.0;
  double norm = 0.0;
  for (int k = start; k >= 0; --k) {
    if (k == n) target = current;
    if (k % 2 == 0) norm += coeff[k / 2] * current;
    if (k == 0) break;
    const double lower = 2.0 * (mu + k) / x * current - upper;
    upper = current;
    current = lower;
    if (std::abs(current) > 1e250) {
      current *= 1e-250;
      upper *= 1e-250;
      target *= 1e-250;
      norm *= 1e-250;
    }
  }
  const double scale = integer ? 1.0 : std::pow(0.5 * x, mu);
  return target * scale / norm;
}

double bessel_half_integer(double nu, double x) {
  if (x < 2.0 || x < nu + 1.0) return bessel_series(nu, x);
  const double root = std::sqrt(2.0 / (pi * x));
  double lower = root * std::cos(x);  // J_{-1/2}
  if (nu < 0.0) return lower;
  double current = root * std::sin(x);  // J_{1/2}
  for (double order = 0.5; order < nu - 1e-12; order += 1.0) {
    const double next = 2.0 * order / x * current - lower;
    lower = current;
    current = next;
  }
  return current;
}

}  // namespace

double bessel_j(double nu, double x) {
  if (!(x >= 0.0)) throw std::domain_error("bessel_j: x must be nonnegative");
  if (nu < 0.0 && std::abs(nu + 0.5) > 1e-14)
    throw std::domain_error("bessel_j: order must be >= 0 or exactly -1/2");
  if (x == 0.0) return nu == 0.0 ? 1.0 : (nu < 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  if (is_half_integer(nu)) return bessel_half_integer(nu, x);
  if (x <= bessel_series_limit || x < nu) return bessel_series(nu, x);
  if (x >= bessel_asymptotic_limit && x >= 2.0 * nu * nu) return bessel_hankel(nu, x);
  return bessel_miller(nu, x);
}

double sine_integral(double x) {
  if (x < 0.0) return -sine_integral(-x);
  if (x == 0.0) return 0.0;
  if (x <= 4.0) {
    const double x2 = x * x;
    double term = x;
    double sum = x;
    for (int k = 1; k < 100; ++k) {
      term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
      const double add = term / (2.0 * k + 1.0);
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  // Auxiliary functions via the continued fraction of E1(ix).
  constexpr double tiny = 1e-300;
  std::complex<double> b(1.0, x);
  std::complex<double> c(1.0 / tiny, 0.0);
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  for (int i = 2; i < 1000; ++i) {
    const double a = -static_cast<double>((i - 1) * (i - 1));
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const std::complex<double> del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16) break;
  }
  h *= std::complex<double>(std::cos(x), -std::sin(x));
  return 0.5 * pi + h.imag();
}

double cosine_integral(double x) {
  if (!(x > 0.0)) throw std::domain_error("cosine_integral: x must be positive");
  if (x <= 4.0) {
    const double x2 = x * x;
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 100; ++k) {
      term *= -x2 / ((2.0 * k - 1.0) * (2.0 * k));
      const double add = term / (2.0 * k);
      sum += add;
      if (std::abs(add) < 1e-18 * (std::abs(sum) + 1.0)) break;
    }
    return euler_gamma + std::log(x) + sum;
  }
  constexpr double tiny = 1e-300;
  std::complex<double> b(1.0, x);
  std::complex<double> c(1.0 / tiny, 0.0);
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  for (int i = 2; i < 1000; ++i) {
    const double a = -static_cast<double>((i - 1) * (i - 1));
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const std::complex<double> del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16) break;
  }
  h *= std::complex<double>(std::cos(x), -std::sin(x));
  return -h.real();
}

double si_minus_sin(double x) {
  if (std::abs(x) >= 0.5) return sine_integral(x) - std::sin(x);
  const double x2 = x * x;
  double term = x;
  double sum = 0.0;
  for (int k = 1; k < 60; ++k) {
    term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
    const double add = -term * (2.0 * k) / (2.0 * k + 1.0);
    sum += add;
    if (std::abs(add) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

HermiteRule gauss_hermite(int order) {
  if (order < 1) throw std::invalid_argument("gauss_hermite: order must be positive");
  constexpr double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int n = order;
  std::vector<double> x(n), w(n);
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(j / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / (pp * pp);
  }
  HermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double sqrt_pi = std::sqrt(pi);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = std::sqrt(2.0) * x[i];
    rule.weights[i] = w[i] / sqrt_pi;
  }
  return rule;
}

}  // namespace gmc::special
