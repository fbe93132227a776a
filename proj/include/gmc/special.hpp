// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace gmc::special {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double euler_gamma = 0.57721566490153286061;

// Branch thresholds of bessel_j (in x).
inline constexpr double bessel_series_limit = 8.0;
inline constexpr double bessel_asymptotic_limit = 25.0;

/// Bessel function of the first kind J_nu(x) for x >= 0.
///
/// Orders nu >= 0 are supported, plus nu = -1/2 (needed by the d = 1 radial
/// transform). Half-integer orders use the closed spherical forms; other
/// orders use the power series for x <= 8, Miller's backward recurrence for
/// 8 < x < 25 and the Hankel asymptotic expansion beyond.
double bessel_j(double nu, double x);

/// Sine integral Si(x) = int_0^x sin(t)/t dt.
double sine_integral(double x);

/// Cosine integral Ci(x) = gamma + ln x + int_0^x (cos t - 1)/t dt, x > 0.
double cosine_integral(double x);

/// l(x) = Si(x) - sin(x), evaluated by its Taylor series for small x where the
/// two terms nearly cancel.
double si_minus_sin(double x);

/// Nodes and weights for E[f(Z)], Z ~ N(0,1): sum_i w_i f(x_i).
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule of the given order, rescaled to the standard normal.
HermiteRule gauss_hermite(int order);

}  // namespace gmc::special
