// SPDX-License-Identifier: Apache-2.0
#include "gmc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gmc/special.hpp"
#include "gmc/spectral.hpp"

namespace gmc {

using special::pi;

double Remainder::eval(double radius) const {
  switch (kind) {
    case RemainderKind::zero: return 0.0;
    case RemainderKind::constant: return constant;
    case RemainderKind::table: {
      if (radius <= r.front()) return g.front();
      if (radius >= r.back()) return g.back();
      const auto it = std::upper_bound(r.begin(), r.end(), radius);
      const std::size_t i = static_cast<std::size_t>(it - r.begin());
      const double w = (radius - r[i - 1]) / (r[i] - r[i - 1]);
      return (1.0 - w) * g[i - 1] + w * g[i];
    }
    case RemainderKind::cone: break;
  }
  throw std::logic_error("Remainder::eval: cone remainder needs the kernel scale");
}

double Remainder::tail() const {
  switch (kind) {
    case RemainderKind::constant: return constant;
    case RemainderKind::table: return g.back();
    default: return 0.0;
  }
}

double Remainder::sup_abs() const {
  switch (kind) {
    case RemainderKind::zero: return 0.0;
    case RemainderKind::constant: return std::abs(constant);
    case RemainderKind::table: {
      double m = 0.0;
      for (double v : g) m = std::max(m, std::abs(v));
      return m;
    }
    case RemainderKind::cone: return std::numeric_limits<double>::quiet_NaN();
  }
  return 0.0;
}

void KernelSpec::validate() const {
  if (dimension < 1 || dimension > 3) throw std::invalid_argument("kernel: dimension must be 1, 2 or 3");
  if (!(lambda2 > 0.0) || !std::isfinite(lambda2)) throw std::invalid_argument("kernel: lambda2 must be positive");
  if (std::abs(lambda2 - 2.0 * dimension) <= 1e-12 * dimension)
    throw std::invalid_argument("kernel: lambda2 = 2d is the excluded critical value");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("kernel: scale must be positive");
  if (remainder.kind == RemainderKind::constant && !std::isfinite(remainder.constant))
    throw std::invalid_argument("kernel: remainder constant must be finite");
  if (remainder.kind == RemainderKind::table) {
    const auto& r = remainder.r;
    const auto& g = remainder.g;
    if (r.empty() || r.size() != g.size()) throw std::invalid_argument("kernel: remainder table needs matching r and g");
    if (r.front() < 0.0) throw std::invalid_argument("kernel: remainder table radii must be >= 0");
    for (std::size_t i = 1; i < r.size(); ++i)
      if (!(r[i] > r[i - 1])) throw std::invalid_argument("kernel: remainder table radii must increase");
    for (double v : g)
      if (!std::isfinite(v)) throw std::invalid_argument("kernel: remainder table values must be finite");
  }
}

void MollifierSpec::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("mollifier: epsilon must be positive");
}

std::string to_string(MollifierKind k) { return k == MollifierKind::gaussian ? "gaussian" : "fejer"; }

MollifierKind mollifier_kind_from_string(const std::string& s) {
  if (s == "gaussian") return MollifierKind::gaussian;
  if (s == "fejer") return MollifierKind::fejer;
  throw std::invalid_argument("unknown mollifier kind '" + s + "'");
}

std::string to_string(RemainderKind k) {
  switch (k) {
    case RemainderKind::zero: return "zero";
    case RemainderKind::constant: return "constant";
    case RemainderKind::table: return "table";
    case RemainderKind::cone: return "cone";
  }
  return "zero";
}

RemainderKind remainder_kind_from_string(const std::string& s) {
  if (s == "zero") return RemainderKind::zero;
  if (s == "constant") return RemainderKind::constant;
  if (s == "table") return RemainderKind::table;
  if (s == "cone") return RemainderKind::cone;
  throw std::invalid_argument("unknown remainder kind '" + s + "'");
}

KernelValue eval_kernel(const KernelSpec& spec, double r) {
  if (!(r >= 0.0)) throw std::domain_error("eval_kernel: r must be nonnegative");
  if (r == 0.0) return {0.0, true};
  const double logpart = spec.lambda2 * std::max(std::log(spec.scale / r), 0.0);
  const double g = spec.remainder.kind == RemainderKind::cone
                       ? spec.lambda2 * cone_remainder(spec.dimension, spec.scale, r)
                       : spec.remainder.eval(r);
  return {logpart + g, false};
}

double half_ball_volume(int d) {
  switch (d) {
    case 1: return 1.0;
    case 2: return pi / 4.0;
    case 3: return pi / 6.0;
    case 4: return pi * pi / 32.0;
    default: throw std::invalid_argument("half_ball_volume: d must be 1..4");
  }
}

double lens_volume(int d, double r, double a) {
  if (r >= 2.0 * a) return 0.0;
  switch (d) {
    case 1: return 2.0 * a - r;
    case 2: return 2.0 * a * a * std::acos(r / (2.0 * a)) - 0.5 * r * std::sqrt(4.0 * a * a - r * r);
    case 3: return pi / 12.0 * (4.0 * a + r) * (2.0 * a - r) * (2.0 * a - r);
    default: throw std::invalid_argument("lens_volume: d must be 1..3");
  }
}

QuadResult eval_cone_kernel(double lambda2, double T, int d, double r, double rel_tol) {
  if (d < 1 || d > 3) throw std::invalid_argument("eval_cone_kernel: d must be 1..3");
  if (!(T > 0.0)) throw std::invalid_argument("eval_cone_kernel: T must be positive");
  if (!(r > 0.0)) throw std::domain_error("eval_cone_kernel: the kernel is singular at r = 0");
  if (r >= T) return {0.0, 0.0, true, 0};
  if (d == 1) return {lambda2 * std::log(T / r), 0.0, true, 0};
  const double c = half_ball_volume(d);
  // t = e^u turns dt / t^{d+1} into du / t^d.
  auto integrand = [&](double u) {
    const double t = std::exp(u);
    return lens_volume(d, r, 0.5 * t) * std::pow(t, -d);
  };
  QuadOptions opt;
  opt.abs_tol = 1e-14;
  opt.rel_tol = rel_tol;
  QuadResult q = integrate(integrand, std::log(r), std::log(T), opt);
  const double cap = lens_volume(d, r, 0.5 * T) * std::pow(T, -d) / d;
  q.value = lambda2 * (q.value + cap) / c;
  q.error = lambda2 * q.error / c;
  return q;
}

double cone_remainder(int d, double T, double r) {
  if (r >= T) return 0.0;
  if (d == 1) return 0.0;
  // The remainder is continuous at 0 with an O(r) correction.
  const double rr = std::max(r, 1e-9 * T);
  return eval_cone_kernel(1.0, T, d, rr, 1e-12).value - std::log(T / rr);
}

namespace {

// Fourier transform of the indicator of B(0, a) at frequency xi.
double ball_hat(int d, double a, double xi) {
  const double x = 2.0 * pi * a * xi;
  switch (d) {
    case 1:
      if (x < 1e-4) return 2.0 * a * (1.0 - x * x / 6.0);
      return std::sin(x) / (pi * xi);
    case 2:
      if (x < 1e-4) return pi * a * a * (1.0 - x * x / 8.0);
      return a * special::bessel_j(1.0, x) / xi;
    case 3: {
      if (x < 1e-2) {
        const double x2 = x * x;
        return 4.0 * pi * a * a * a / 3.0 * (1.0 - x2 / 10.0 + x2 * x2 / 280.0);
      }
      return (std::sin(x) - x * std::cos(x)) / (2.0 * pi * pi * xi * xi * xi);
    }
    default: throw std::invalid_argument("ball_hat: d must be 1..3");
  }
}

}  // namespace

QuadResult cone_kernel_hat(double lambda2, double T, int d, double xi) {
  const double c = half_ball_volume(d);
  auto integrand = [&](double t) {
    const double b = ball_hat(d, 0.5 * t, xi);
    return b * b * std::pow(t, -d - 1);
  };
  std::vector<double> breaks{0.0};
  const double step = xi > 0.0 ? 0.5 / xi : T;
  for (double t = step; t < T; t += step) breaks.push_back(t);
  breaks.push_back(T);
  if (breaks.size() < 5) {
    breaks.clear();
    for (int i = 0; i <= 4; ++i) breaks.push_back(T * i / 4.0);
  }
  QuadOptions opt;
  opt.abs_tol = 1e-15;
  opt.rel_tol = 1e-11;
  opt.max_panels = static_cast<int>(breaks.size()) + 5000;
  QuadResult q = integrate_panels(integrand, breaks, opt);
  const double bT = ball_hat(d, 0.5 * T, xi);
  q.value = lambda2 * (q.value + bT * bT * std::pow(T, -d) / d) / c;
  q.error = lambda2 * q.error / c;
  return q;
}

double sigma_positive_layer(int n, int d, double T, double r) {
  if (n < 1) throw std::invalid_argument("sigma_positive_layer: n must be >= 1");
  if (d != 1 && d != 2) throw std::invalid_argument("sigma_positive_layer: d must be 1 or 2");
  if (!(r >= 0.0)) throw std::domain_error("sigma_positive_layer: r must be nonnegative");
  const double mu = d == 1 ? 1.0 : 0.5;
  const double top = std::pow(T, mu);
  const double rm = std::pow(r, mu);
  if (n == 1) return std::max(top - rm, 0.0) / top / mu;
  const double lo = top / n;
  const double hi = top / (n - 1);
  const double a = std::max(lo, rm);
  if (a >= hi) return 0.0;
  // int_a^hi (t - rm) dt / t^2
  return (std::log(hi / a) + rm * (1.0 / hi - 1.0 / a)) / mu;
}

double mollifier_profile(MollifierKind kind, int d, double r) {
  if (kind == MollifierKind::gaussian) return std::exp(-0.5 * r * r) / std::pow(2.0 * pi, 0.5 * d);
  const double x = pi * r;
  switch (d) {
    case 1: {
      if (x < 1e-4) return 1.0 - x * x / 3.0;
      const double s = std::sin(x) / x;
      return s * s;
    }
    case 2: {
      if (x < 1e-4) return pi / 4.0 * (1.0 - x * x / 4.0);
      const double j = special::bessel_j(1.0, x);
      return j * j / (pi * r * r);
    }
    case 3: {
      double h;
      if (x < 1e-2) {
        const double x2 = x * x;
        h = x2 / 3.0 - x2 * x2 / 30.0 + x2 * x2 * x2 / 840.0;
      } else {
        h = std::sin(x) / x - std::cos(x);
      }
      // |FT 1_{B(0,1/2)}|^2 / |B(0,1/2)|; for tiny r the x^2 cancels with r^2.
      const double b = r > 0.0 ? h / (2.0 * pi * r * r) : pi / 6.0;
      return b * b / (pi / 6.0);
    }
    default: throw std::invalid_argument("mollifier_profile: d must be 1..3");
  }
}

double mollifier_hat(MollifierKind kind, double s, int d) {
  s = std::abs(s);
  if (kind == MollifierKind::gaussian) return std::exp(-2.0 * pi * pi * s * s);
  if (s >= 1.0) return 0.0;
  switch (d) {
    case 1: return 1.0 - s;
    case 2: return 2.0 / pi * (std::acos(s) - s * std::sqrt(1.0 - s * s));
    case 3: return 1.0 - 1.5 * s + 0.5 * s * s * s;
    default: throw std::invalid_argument("mollifier_hat: d must be 1..3");
  }
}

DecayBound mollifier_decay(MollifierKind kind, int d) {
  // gamma = 1 for both; C from a dense scan with 10% headroom.
  double c = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double r = 1e-3 * i;
    c = std::max(c, std::abs(mollifier_profile(kind, d, r)) * (1.0 + std::pow(r, d + 1.0)));
  }
  return {1.1 * c, 1.0};
}

double mollifier_hat_cutoff(MollifierKind kind) {
  if (kind == MollifierKind::fejer) return 1.0;
  return std::sqrt(17.0 * std::log(10.0) / (2.0 * pi * pi));
}

QuadResult mollified_covariance(const KernelSpec& spec, const MollifierSpec& moll, double r, double abs_tol) {
  spec.validate();
  moll.validate();
  if (!(r >= 0.0)) throw std::domain_error("mollified_covariance: r must be nonnegative");
  const int d = spec.dimension;
  const double eps = moll.epsilon;
  const double xi_max = mollifier_hat_cutoff(moll.kind) / eps;
  long evals = 0;
  double inner_err = 0.0;
  auto density = [&](double xi) {
    const QuadResult h = kernel_hat(spec, xi);
    inner_err = std::max(inner_err, h.error);
    ++evals;
    return h.value * mollifier_hat(moll.kind, eps * xi, d);
  };
  // S_{d-1} for the r = 0 shell integral.
  const double sphere = d == 1 ? 2.0 : (d == 2 ? 2.0 * pi : 4.0 * pi);
  std::function<double(double)> integrand;
  if (r == 0.0) {
    integrand = [&](double xi) { return sphere * std::pow(xi, d - 1) * density(xi); };
  } else if (d == 1) {
    integrand = [&](double xi) { return 2.0 * std::cos(2.0 * pi * r * xi) * density(xi); };
  } else if (d == 3) {
    integrand = [&](double xi) { return 2.0 / r * xi * std::sin(2.0 * pi * r * xi) * density(xi); };
  } else {
    integrand = [&](double xi) { return 2.0 * pi * xi * special::bessel_j(0.0, 2.0 * pi * r * xi) * density(xi); };
  }
  // Half-periods of both oscillations: 1/(2r) from the transform, 1/(2R)
  // from f_hat.
  const double width = 0.5 / std::max(r, spec.scale);
  std::vector<double> breaks{0.0};
  for (double x = width; x < xi_max; x += width) breaks.push_back(x);
  breaks.push_back(xi_max);
  QuadOptions opt;
  opt.abs_tol = abs_tol;
  opt.rel_tol = 1e-12;
  opt.max_panels = static_cast<int>(breaks.size()) + 4000;
  QuadResult q = integrate_panels(integrand, breaks, opt);
  q.value += kernel_atom(spec);
  q.error += inner_err * sphere * std::pow(xi_max, d);
  q.converged = q.error <= std::max(10.0 * abs_tol, 1e-10 * std::abs(q.value));
  return q;
}

}  // namespace gmc
