// SPDX-License-Identifier: Apache-2.0
#include "gmc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gmc/special.hpp"

namespace gmc {

using special::pi;

namespace {

double sphere_area(int d) { return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d); }

}  // namespace

RadialProfile logplus_profile(double T) {
  return {[T](double rho) { return rho < T ? std::log(T / rho) : 0.0; }, T, {}, "logplus"};
}

RadialProfile gaussian_profile() {
  return {[](double rho) { return std::exp(-0.5 * rho * rho); }, 12.0, {}, "gaussian"};
}

RadialProfile indicator_profile(double a) {
  return {[a](double rho) { return rho <= a ? 1.0 : 0.0; }, a, {}, "indicator"};
}

RadialProfile triangle_profile() {
  return {[](double rho) { return std::max(1.0 - rho, 0.0); }, 1.0, {}, "triangle"};
}

QuadResult radial_fourier(const RadialProfile& profile, int d, double xi, QuadOptions opt) {
  if (d < 1) throw std::invalid_argument("radial_fourier: d must be >= 1");
  if (!(xi >= 0.0)) throw std::invalid_argument("radial_fourier: xi must be nonnegative");
  const double a = profile.support;
  const auto& f = profile.f;
  std::vector<double> breaks{0.0};
  std::function<double(double)> integrand;
  if (xi == 0.0) {
    const double s = sphere_area(d);
    integrand = [&, s](double rho) { return s * std::pow(rho, d - 1) * f(rho); };
    for (int i = 1; i < 8; ++i) breaks.push_back(a * i / 8.0);
  } else {
    const double k = 2.0 * pi * xi;
    const double nu = 0.5 * (d - 2);
    if (d == 1) {
      integrand = [&, k](double rho) { return 2.0 * std::cos(k * rho) * f(rho); };
    } else if (d == 3) {
      integrand = [&, k, xi](double rho) { return 2.0 / xi * rho * std::sin(k * rho) * f(rho); };
    } else {
      const double pre = 2.0 * pi * std::pow(xi, -nu);
      integrand = [&, k, nu, pre, d](double rho) {
        return pre * std::pow(rho, 0.5 * d) * special::bessel_j(nu, k * rho) * f(rho);
      };
    }
    // McMahon's estimate of the Bessel zeros, (j + nu/2 - 1/4) pi.
    for (int j = 1;; ++j) {
      const double z = (j + 0.5 * nu - 0.25) * pi / k;
      if (z >= a) break;
      if (z > 0.0) breaks.push_back(z);
    }
    if (breaks.size() < 8) {
      breaks.assign(1, 0.0);
      for (int i = 1; i < 8; ++i) breaks.push_back(a * i / 8.0);
    }
  }
  for (double kink : profile.kinks)
    if (kink > 0.0 && kink < a) breaks.push_back(kink);
  breaks.push_back(a);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  opt.max_panels = std::max(opt.max_panels, static_cast<int>(breaks.size()) + 4000);
  return integrate_panels(integrand, breaks, opt);
}

double logplus_hat_1d(double xi, double T) {
  if (xi == 0.0) return 2.0 * T;
  return special::sine_integral(2.0 * pi * T * xi) / (pi * xi);
}

double logplus_hat_2d(double xi, double T) {
  if (xi == 0.0) return pi * T * T / 2.0;
  const double x = 2.0 * pi * T * xi;
  double one_minus_j0;
  if (x < 0.5) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    one_minus_j0 = 0.0;
    for (int k = 1; k < 30; ++k) {
      term *= -q / (static_cast<double>(k) * k);
      one_minus_j0 -= term;
      if (std::abs(term) < 1e-18) break;
    }
  } else {
    one_minus_j0 = 1.0 - special::bessel_j(0.0, x);
  }
  return one_minus_j0 / (2.0 * pi * xi * xi);
}

double logplus_hat_3d(double xi, double T) {
  if (xi == 0.0) return 4.0 * pi * T * T * T / 9.0;
  return special::si_minus_sin(2.0 * pi * xi * T) / (2.0 * pi * pi * xi * xi * xi);
}

double logplus_hat_4d(double xi, double T) {
  if (xi == 0.0) return pi * pi * std::pow(T, 4) / 8.0;
  const double K = 2.0 * pi * T * xi;
  // int_0^K x J_2(x) dx = 2 - 2 J_0(K) - K J_1(K)
  double moment;
  if (K < 2.0) {
    moment = 0.0;
    double fact_k = 1.0;
    double fact_k2 = 2.0;
    for (int k = 0; k < 40; ++k) {
      if (k > 0) {
        fact_k *= k;
        fact_k2 *= (k + 2);
      }
      const double term = std::pow(-1.0, k) * std::pow(K, 2 * k + 4) /
                          (std::pow(2.0, 2 * k + 2) * fact_k * fact_k2 * (2 * k + 4));
      moment += term;
      if (std::abs(term) < 1e-18 * std::abs(moment)) break;
    }
  } else {
    moment = 2.0 - 2.0 * special::bessel_j(0.0, K) - K * special::bessel_j(1.0, K);
  }
  return moment / (4.0 * pi * pi * std::pow(xi, 4));
}

double logplus_hat(int d, double xi, double T) {
  switch (d) {
    case 1: return logplus_hat_1d(xi, T);
    case 2: return logplus_hat_2d(xi, T);
    case 3: return logplus_hat_3d(xi, T);
    case 4: return logplus_hat_4d(xi, T);
    default: throw std::invalid_argument("logplus_hat: d must be 1..4");
  }
}

QuadResult kernel_hat(const KernelSpec& spec, double xi) {
  const int d = spec.dimension;
  switch (spec.remainder.kind) {
    case RemainderKind::zero:
    case RemainderKind::constant:
      return {spec.lambda2 * logplus_hat(d, xi, spec.scale), 0.0, true, 0};
    case RemainderKind::cone:
      return cone_kernel_hat(spec.lambda2, spec.scale, d, xi);
    case RemainderKind::table: {
      const Remainder& g = spec.remainder;
      const double tail = g.tail();
      RadialProfile p{[&g, tail](double rho) { return g.eval(rho) - tail; }, g.r.back(), g.r, "remainder"};
      QuadOptions opt;
      opt.abs_tol = 1e-13;
      QuadResult q = radial_fourier(p, d, xi, opt);
      q.value += spec.lambda2 * logplus_hat(d, xi, spec.scale);
      return q;
    }
  }
  return {};
}

double kernel_atom(const KernelSpec& spec) { return spec.remainder.tail(); }

std::string to_string(Certificate c) {
  switch (c) {
    case Certificate::nonnegative_on_grid: return "nonnegative-on-grid";
    case Certificate::sign_oscillating: return "sign-oscillating";
    case Certificate::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

void require_resolution(const std::vector<double>& xi_grid, double T) {
  if (xi_grid.empty()) throw std::invalid_argument("positivity check: empty frequency grid");
  const double xi_max = *std::max_element(xi_grid.begin(), xi_grid.end());
  const std::size_t need = static_cast<std::size_t>(std::ceil(xi_max * T));
  if (xi_max * T < 50.0) {
    std::ostringstream msg;
    msg << "positivity check: grid reaches xi*T = " << xi_max * T << ", need at least 50";
    throw GridTooCoarse(msg.str(), 50, 50.0 / T);
  }
  std::size_t top = 0;
  for (double x : xi_grid)
    if (x >= 0.5 * xi_max) ++top;
  if (top < need) {
    std::ostringstream msg;
    msg << "positivity check: top octave holds " << top << " points, need " << need
        << " (two per oscillation period 1/T)";
    throw GridTooCoarse(msg.str(), need, xi_max);
  }
}

std::vector<double> certificate_grid(double T, double lo, double hi, int n_log) {
  std::vector<double> xi;
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n_log; ++i) xi.push_back(std::exp(a + (b - a) * i / (n_log - 1)) / T);
  const double xi_max = hi / T;
  const int top = static_cast<int>(std::ceil(hi)) + 1;
  for (int i = 0; i < top; ++i) xi.push_back(xi_max * (0.5 + 0.5 * i / (top - 1)));
  std::sort(xi.begin(), xi.end());
  xi.erase(std::unique(xi.begin(), xi.end()), xi.end());
  return xi;
}

SpectralProfile check_positive_definite(const RadialProfile& profile, int d, const std::vector<double>& xi_grid,
                                        double T) {
  require_resolution(xi_grid, T);
  SpectralProfile out;
  out.dimension = d;
  out.xi = xi_grid;
  out.fhat.resize(xi_grid.size());
  out.err.resize(xi_grid.size());
  const QuadResult zero = radial_fourier(profile, d, 0.0);
  QuadOptions opt;
  opt.abs_tol = 1e-15 * std::max(1.0, std::abs(zero.value));
  opt.rel_tol = 1e-10;
  for (std::size_t i = 0; i < xi_grid.size(); ++i) {
    const QuadResult q = radial_fourier(profile, d, xi_grid[i], opt);
    out.fhat[i] = q.value;
    out.err[i] = q.error;
    if (q.converged) ++out.converged_points;
  }
  const double xi_max = *std::max_element(xi_grid.begin(), xi_grid.end());
  bool top_pos = false, top_neg = false;
  for (std::size_t i = 0; i < xi_grid.size(); ++i) {
    const bool neg = out.fhat[i] < -out.err[i];
    const bool pos = out.fhat[i] > out.err[i];
    if (neg) ++out.negative_points;
    if (xi_grid[i] >= 0.5 * xi_max) {
      top_pos = top_pos || pos;
      top_neg = top_neg || neg;
    }
  }
  if (out.negative_points == 0)
    out.certificate = Certificate::nonnegative_on_grid;
  else if (top_pos && top_neg)
    out.certificate = Certificate::sign_oscillating;
  else
    out.certificate = Certificate::indeterminate;
  return out;
}

}  // namespace gmc
