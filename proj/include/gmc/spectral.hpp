// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmc/kernels.hpp"
#include "gmc/quadrature.hpp"

namespace gmc {

// Radial profile f(rho) for the radial transform. Beyond `support` the
// profile is treated as zero; `kinks` are points where f is not smooth.
struct RadialProfile {
  std::function<double(double)> f;
  double support = 1.0;
  std::vector<double> kinks;
  std::string name;
};

RadialProfile logplus_profile(double T);
RadialProfile gaussian_profile();              // exp(-rho^2 / 2)
RadialProfile indicator_profile(double a);     // 1 on [0, a]
RadialProfile triangle_profile();              // (1 - rho)_+

// Radial Fourier transform with the e^{-2 i pi x.xi} convention:
// f_hat(xi) = 2 pi xi^{-(d-2)/2} int_0^inf rho^{d/2} J_{(d-2)/2}(2 pi xi rho) f(rho) drho.
// Panels are split at the approximate zeros of the Bessel factor.
QuadResult radial_fourier(const RadialProfile& profile, int d, double xi, QuadOptions opt = {});

// Closed-form transforms of ln+(T/|x|).
double logplus_hat_1d(double xi, double T);
double logplus_hat_2d(double xi, double T);
double logplus_hat_3d(double xi, double T);
double logplus_hat_4d(double xi, double T);
double logplus_hat(int d, double xi, double T);

// Spectral density of a kernel spec without the zero-frequency atom, and
// the atom itself (the constant the remainder tends to at infinity).
QuadResult kernel_hat(const KernelSpec& spec, double xi);
double kernel_atom(const KernelSpec& spec);

enum class Certificate { nonnegative_on_grid, sign_oscillating, indeterminate };
std::string to_string(Certificate c);

struct SpectralProfile {
  int dimension = 0;
  std::vector<double> xi;
  std::vector<double> fhat;
  std::vector<double> err;
  Certificate certificate = Certificate::indeterminate;
  std::size_t negative_points = 0;
  std::size_t converged_points = 0;
};

class GridTooCoarse : public std::invalid_argument {
 public:
  GridTooCoarse(const std::string& what, std::size_t required_top_octave, double required_xi_max)
      : std::invalid_argument(what), required_top_octave(required_top_octave), required_xi_max(required_xi_max) {}
  std::size_t required_top_octave;
  double required_xi_max;
};

// Resolution rule: xi_max T >= 50, and the top octave [xi_max/2, xi_max]
// holds at least xi_max T points (two samples per f_hat oscillation period 1/T).
void require_resolution(const std::vector<double>& xi_grid, double T);

// Log-spaced grid on [lo/T, hi/T] plus a uniform top octave meeting the rule.
std::vector<double> certificate_grid(double T, double lo = 1e-2, double hi = 1e3, int n_log = 200);

SpectralProfile check_positive_definite(const RadialProfile& profile, int d, const std::vector<double>& xi_grid,
                                        double T);

}  // namespace gmc
