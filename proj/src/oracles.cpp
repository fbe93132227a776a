// SPDX-License-Identifier: Apache-2.0
#include "gmc/oracles.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gmc/quadrature.hpp"
#include "gmc/special.hpp"
#include "gmc/stats.hpp"

namespace gmc::oracles {

using nlohmann::json;

void GaussianVectorSpec::validate() const {
  if (n < 1 || n > 4) throw std::invalid_argument("gaussian vector: size must be in 1..4");
  if (cov.size() != static_cast<std::size_t>(n * n)) throw std::invalid_argument("gaussian vector: covariance is not n x n");
  if (weights.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("gaussian vector: need n weights");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("gaussian vector: weights must be positive");
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(at(i, j))) throw std::invalid_argument("gaussian vector: covariance is not finite");
      if (std::abs(at(i, j) - at(j, i)) > 1e-12 * (1.0 + std::abs(at(i, j))))
        throw std::invalid_argument("gaussian vector: covariance is not symmetric");
      m(i, j) = at(i, j);
    }
  const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
  if (lo < -1e-12) {
    std::ostringstream msg;
    msg << "gaussian vector: covariance is not positive semidefinite (eigenvalue " << lo << ")";
    throw std::invalid_argument(msg.str());
  }
}

std::string to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    default: return "inconclusive";
  }
}

json to_json(const Verdict& v) {
  return json{{"name", v.name},     {"status", to_string(v.status)}, {"value", v.value},
              {"margin", v.margin}, {"budget", v.budget},            {"detail", v.detail}};
}

std::string to_string(TestFunction f) {
  switch (f) {
    case TestFunction::power: return "power";
    case TestFunction::exp_neg: return "exp_neg";
    case TestFunction::square: return "square";
    case TestFunction::call: return "call";
    default: return "power15";
  }
}

std::string to_string(SupFunction f) {
  switch (f) {
    case SupFunction::identity: return "identity";
    case SupFunction::positive_part: return "positive_part";
    default: return "smooth_step";
  }
}

double Phi::value(double u) const {
  switch (kind) {
    case TestFunction::power: return std::pow(u, a);
    case TestFunction::exp_neg: return std::exp(-u);
    case TestFunction::square: return u * u;
    case TestFunction::call: return std::max(u - a, 0.0);
    default: return std::pow(u, 1.5);
  }
}

double Phi::second(double u) const {
  switch (kind) {
    case TestFunction::power: return a * (a - 1.0) * std::pow(u, a - 2.0);
    case TestFunction::exp_neg: return std::exp(-u);
    case TestFunction::square: return 2.0;
    case TestFunction::power15: return 0.75 / std::sqrt(u);
    default: throw std::invalid_argument("phi: the call payoff has no second derivative");
  }
}

namespace {

// Square root factor A with A A^T = cov, from the eigendecomposition so
// singular covariances are allowed.
Eigen::MatrixXd sqrt_factor(const std::vector<double>& cov, int n) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cov[static_cast<std::size_t>(i) * n + j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal();
}

std::vector<double> blend(const GaussianVectorSpec& x, const GaussianVectorSpec& y, double t) {
  std::vector<double> c(x.cov.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = t * x.cov[i] + (1.0 - t) * y.cov[i];
  return c;
}

void require_pair(const GaussianVectorSpec& x, const GaussianVectorSpec& y) {
  x.validate();
  y.validate();
  if (x.n != y.n) throw std::invalid_argument("oracle: vectors differ in size");
  for (int i = 0; i < x.n; ++i)
    if (x.weights[i] != y.weights[i]) throw std::invalid_argument("oracle: vectors must share weights");
}

bool same_covariance(const GaussianVectorSpec& x, const GaussianVectorSpec& y) { return x.cov == y.cov; }

// W = sum p_i exp(z_i - c_ii / 2).
double chaos_sum(const double* z, const std::vector<double>& c, const std::vector<double>& w, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += w[i] * std::exp(z[i] - 0.5 * c[static_cast<std::size_t>(i) * n + i]);
  return s;
}

double expected_phi(const GaussianVectorSpec& x, const GaussianVectorSpec& y, const Phi& phi, double t, int order) {
  const std::vector<double> c = blend(x, y, t);
  return gaussian_expectation(c, x.n, order, [&](const double* z) { return phi.value(chaos_sum(z, c, x.weights, x.n)); });
}

double kahane_rhs(const GaussianVectorSpec& x, const GaussianVectorSpec& y, const Phi& phi, double t, int order) {
  const int n = x.n;
  const std::vector<double> c = blend(x, y, t);
  return gaussian_expectation(c, n, order, [&](const double* z) {
    double e[4];
    double w = 0.0;
    for (int i = 0; i < n; ++i) {
      e[i] = x.weights[i] * std::exp(z[i] - 0.5 * c[static_cast<std::size_t>(i) * n + i]);
      w += e[i];
    }
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += (x.at(i, j) - y.at(i, j)) * e[i] * e[j];
    return 0.5 * s * phi.second(w);
  });
}

}  // namespace

double gaussian_expectation(const std::vector<double>& cov, int n, int order,
                            const std::function<double(const double*)>& h) {
  if (n < 1 || n > 3) throw std::invalid_argument("gaussian_expectation: tensor quadrature needs n <= 3");
  const Eigen::MatrixXd a = sqrt_factor(cov, n);
  const special::HermiteRule rule = special::gauss_hermite(order);
  const special::HermiteRule one{{0.0}, {1.0}};
  // Degenerate principal axes collapse to a single node.
  const double top = a.colwise().norm().maxCoeff();
  std::array<const special::HermiteRule*, 3> axis{&one, &one, &one};
  for (int k = 0; k < n; ++k) axis[k] = a.col(k).norm() > 1e-14 * std::max(top, 1e-300) ? &rule : &one;
  double sum = 0.0;
  double z[3] = {0.0, 0.0, 0.0};
  double x[3] = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < axis[0]->nodes.size(); ++i) {
    z[0] = axis[0]->nodes[i];
    for (std::size_t j = 0; j < axis[1]->nodes.size(); ++j) {
      z[1] = axis[1]->nodes[j];
      double inner = 0.0;
      for (std::size_t k = 0; k < axis[2]->nodes.size(); ++k) {
        z[2] = axis[2]->nodes[k];
        for (int r = 0; r < n; ++r) {
          x[r] = 0.0;
          for (int c = 0; c < n; ++c) x[r] += a(r, c) * z[c];
        }
        inner += axis[2]->weights[k] * h(x);
      }
      sum += axis[0]->weights[i] * axis[1]->weights[j] * inner;
    }
  }
  return sum;
}

Verdict interpolation_derivative_check(const GaussianVectorSpec& x, const GaussianVectorSpec& y, const Phi& phi,
                                       double t, const InterpolationOptions& opt) {
  require_pair(x, y);
  if (x.n > 3) throw std::invalid_argument("interpolation_derivative_check: n must be <= 3");
  if (phi.kind == TestFunction::call) throw std::invalid_argument("interpolation_derivative_check: phi must be smooth");
  const double h = opt.step;
  if (!(t - 2.0 * h >= 0.0 && t + 2.0 * h <= 1.0)) throw std::invalid_argument("interpolation_derivative_check: t too close to 0 or 1");
  auto central = [&](double step, int order) {
    return (expected_phi(x, y, phi, t + step, order) - expected_phi(x, y, phi, t - step, order)) / (2.0 * step);
  };
  const double d1 = central(h, opt.check_order);
  const double d2 = central(2.0 * h, opt.check_order);
  const double lhs = (4.0 * d1 - d2) / 3.0;  // Richardson, O(h^4)
  const double lhs_low = central(h, opt.order);
  const double rhs = kahane_rhs(x, y, phi, t, opt.check_order);
  const double rhs_low = kahane_rhs(x, y, phi, t, opt.order);
  const double scale = std::abs(expected_phi(x, y, phi, t, opt.check_order));
  const double quad_err = std::abs(d1 - lhs_low) + std::abs(rhs - rhs_low);
  const double fd_err = std::abs(d1 - d2) / 3.0;
  const double round_err = 1e3 * std::numeric_limits<double>::epsilon() * std::max(scale, 1.0) / h;
  Verdict v;
  v.name = "interpolation_derivative";
  v.value = std::abs(lhs - rhs);
  v.budget = quad_err + fd_err + round_err;
  v.margin = v.budget - v.value;
  v.detail = json{{"n", x.n},          {"phi", to_string(phi.kind)}, {"a", phi.a},
                  {"t", t},            {"lhs", lhs},                 {"rhs", rhs},
                  {"plain_residual", std::abs(d1 - rhs)}, {"step", h}, {"order", opt.order},
                  {"check_order", opt.check_order}, {"quadrature_error", quad_err}, {"fd_error", fd_err}};
  if (quad_err > 1e-6 * std::max(1.0, std::abs(rhs))) {
    v.status = Status::inconclusive;
    v.detail["flag"] = "quadrature order insufficient";
  } else {
    v.status = v.value <= v.budget ? Status::pass : Status::fail;
  }
  return v;
}

Verdict convex_comparison_check(const GaussianVectorSpec& x, const GaussianVectorSpec& y, const Phi& f, int order,
                                int check_order) {
  require_pair(x, y);
  if (x.n > 3) throw std::invalid_argument("convex_comparison_check: n must be <= 3");
  for (std::size_t i = 0; i < x.cov.size(); ++i)
    if (x.cov[i] > y.cov[i] + 1e-15) throw std::invalid_argument("convex_comparison_check: need cov X <= cov Y entrywise");
  auto side = [&](const GaussianVectorSpec& s, int q) {
    return gaussian_expectation(s.cov, s.n, q, [&](const double* z) { return f.value(chaos_sum(z, s.cov, s.weights, s.n)); });
  };
  const double lhs = side(x, check_order), rhs = side(y, check_order);
  const double err = std::abs(lhs - side(x, order)) + std::abs(rhs - side(y, order));
  Verdict v;
  v.name = "convex_comparison";
  v.value = rhs - lhs;
  v.margin = rhs - lhs;
  v.budget = err + 1e-13 * std::max(std::abs(lhs), std::abs(rhs));
  v.detail = json{{"n", x.n}, {"F", to_string(f.kind)}, {"a", f.a}, {"lhs", lhs}, {"rhs", rhs}, {"order", order},
                  {"check_order", check_order}};
  if (same_covariance(x, y)) {
    v.status = Status::pass;
    v.detail["equality"] = true;
  } else if (v.margin > v.budget) {
    v.status = Status::pass;
  } else if (v.margin < -v.budget) {
    v.status = Status::fail;
  } else {
    v.status = Status::inconclusive;
  }
  return v;
}

Verdict sup_comparison_check(const GaussianVectorSpec& x, const GaussianVectorSpec& y, SupFunction f,
                             std::uint64_t samples, std::uint64_t seed, std::uint64_t instance) {
  require_pair(x, y);
  const int n = x.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j && std::abs(x.at(i, i) - y.at(i, i)) > 1e-12)
        throw std::invalid_argument("sup_comparison_check: diagonals must agree");
      if (i != j && x.at(i, j) > y.at(i, j) + 1e-15)
        throw std::invalid_argument("sup_comparison_check: need off-diagonal cov X <= cov Y");
    }
  auto F = [f](double m) {
    switch (f) {
      case SupFunction::identity: return m;
      case SupFunction::positive_part: return std::max(m, 0.0);
      default: return 0.5 * std::erfc(-(m - 0.5) / (0.25 * std::sqrt(2.0)));
    }
  };
  Verdict v;
  v.name = "sup_comparison";
  v.detail = json{{"n", n}, {"F", to_string(f)}, {"samples", samples}};
  if (same_covariance(x, y)) {
    v.status = Status::pass;
    v.detail["equality"] = true;
    return v;
  }
  if (n == 2 && f == SupFunction::identity) {
    // E max(X1, X2) = sqrt((s11 + s22 - 2 s12) / (2 pi)).
    auto emax = [](const GaussianVectorSpec& s) {
      return std::sqrt(std::max(s.at(0, 0) + s.at(1, 1) - 2.0 * s.at(0, 1), 0.0) / (2.0 * special::pi));
    };
    v.value = emax(x) - emax(y);
    v.margin = v.value;
    v.budget = 1e-14;
    v.detail["method"] = "closed form";
    v.status = v.margin > v.budget ? Status::pass : (v.margin < -v.budget ? Status::fail : Status::inconclusive);
    return v;
  }
  v.detail["method"] = "paired monte carlo";
  if (samples < 2) {
    v.status = Status::inconclusive;
    v.detail["flag"] = "no Monte Carlo budget";
    return v;
  }
  const Eigen::MatrixXd ax = sqrt_factor(x.cov, n), ay = sqrt_factor(y.cov, n);
  Stream rng(seed, instance, 0, StreamTag::oracle);
  double mean = 0.0, m2 = 0.0;
  Eigen::VectorXd z(n);
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i) z[i] = rng.normal();
    const double diff = F((ax * z).maxCoeff()) - F((ay * z).maxCoeff());
    const double delta = diff - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (diff - mean);
  }
  const double se = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
  v.value = mean;
  v.margin = mean;
  v.budget = 3.0 * se;
  v.detail["standard_error"] = se;
  v.status = v.margin > v.budget ? Status::pass : (v.margin < -v.budget ? Status::fail : Status::inconclusive);
  if (v.status == Status::inconclusive) v.detail["flag"] = "margin within Monte Carlo noise";
  return v;
}

namespace {

double log_normal_cdf(double z) {
  if (z < 0.0) return std::log(0.5 * std::erfc(-z / std::sqrt(2.0)));
  return std::log1p(-0.5 * std::erfc(z / std::sqrt(2.0)));
}

}  // namespace

double sup_moment_expectation(std::uint64_t n, double lambda2, double p) {
  if (n < 1) throw std::invalid_argument("sup_moment_expectation: n >= 1");
  const double ln_n = std::log(static_cast<double>(n));
  if (n == 1) return 1.0;
  const double sigma = std::sqrt(lambda2 * ln_n);
  const double nm1 = static_cast<double>(n - 1);
  // log density of the max plus p sigma z
  auto ell = [&](double z) {
    return p * sigma * z + ln_n - 0.5 * z * z - 0.5 * std::log(2.0 * special::pi) + nm1 * log_normal_cdf(z);
  };
  const double hi = std::max(p * sigma, std::sqrt(2.0 * ln_n)) + 12.0;
  double zpk = -12.0, top = -std::numeric_limits<double>::infinity();
  for (double z = -12.0; z <= hi; z += 1e-3) {
    const double v = ell(z);
    if (v > top) {
      top = v;
      zpk = z;
    }
  }
  QuadOptions opt;
  opt.abs_tol = 1e-15;
  opt.rel_tol = 1e-13;
  const QuadResult q =
      integrate_panels([&](double z) { return std::exp(ell(z) - top); }, {zpk - 40.0, zpk - 5.0, zpk, zpk + 5.0, zpk + 40.0}, opt);
  return std::exp(top - 0.5 * p * lambda2 * ln_n) * q.value;
}

Verdict sup_moment_growth(const std::vector<std::uint64_t>& n_grid, double lambda2, double p) {
  if (n_grid.size() < 3) throw std::invalid_argument("sup_moment_growth: need >= 3 grid points");
  if (!(lambda2 > 0.0) || !(p > 0.0)) throw std::invalid_argument("sup_moment_growth: lambda2 and p must be positive");
  if (!(p < std::max(2.0 / lambda2, 1.0))) throw std::invalid_argument("sup_moment_growth: need p < max(2 / lambda2, 1)");
  std::vector<double> x, y;
  json rows = json::array();
  for (std::uint64_t n : n_grid) {
    const double e = sup_moment_expectation(n, lambda2, p);
    x.push_back(std::log(static_cast<double>(n)));
    y.push_back(std::log(e));
    rows.push_back({{"n", n}, {"expectation", e}});
  }
  const stats::LineFit fit = stats::ols(x, y);
  // Local slope over the top octave: curvature in ln n makes the global fit
  // and the tail slope differ, so the certificate uses the larger of the two.
  const std::size_t m = x.size();
  const double tail = (y[m - 1] - y[m - 2]) / (x[m - 1] - x[m - 2]);
  const double exponent = std::max(fit.slope, tail);
  Verdict v;
  v.name = "sup_moment_growth";
  v.value = exponent;
  v.budget = 3.0 * fit.slope_se;
  v.margin = p - exponent;
  v.detail = json{{"lambda2", lambda2}, {"p", p}, {"fit_slope", fit.slope}, {"fit_se", fit.slope_se},
                  {"tail_slope", tail}, {"x_hat", exponent / p}, {"rows", rows}};
  v.status = v.margin > v.budget ? Status::pass : (v.margin < -v.budget ? Status::fail : Status::inconclusive);
  return v;
}

double log_convolution(MollifierKind kind, double z) {
  if (!(z > 0.0)) throw std::invalid_argument("log_convolution: z must be positive");
  // Symmetric theta: I(z) = -int_0^inf theta(v) ln|1 - v^2 / z^2| dv.
  auto integrand = [&](double v) {
    const double gap = std::abs(z - v);
    if (gap == 0.0) return 0.0;  // integrable log singularity, a null set
    return -mollifier_profile(kind, 1, v) * (std::log(gap / z) + std::log1p(v / z));
  };
  QuadOptions opt;
  opt.abs_tol = 1e-18;
  opt.rel_tol = 1e-12;
  if (kind == MollifierKind::gaussian) {
    const double end = 40.0;
    std::vector<double> breaks{0.0};
    if (z < end) breaks.push_back(z);
    breaks.push_back(end);
    opt.max_panels = 4000;
    return integrate_panels(integrand, breaks, opt).value;
  }
  // sinc^2 has zeros at the integers; beyond V its mean 1 / (2 pi^2 v^2) is
  // integrated in closed form against the logarithm.
  const double V = std::ceil(4.0 * z + 400.0);
  std::vector<double> breaks{z};
  for (double k = 0.0; k <= V; k += 1.0) breaks.push_back(k);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  opt.max_panels = static_cast<int>(breaks.size()) + 4000;
  const double body = integrate_panels(integrand, breaks, opt).value;
  const double M = V / z;
  const double tail = -(1.0 / (2.0 * special::pi * special::pi * z)) * (std::log(M * M - 1.0) / M - std::log((M - 1.0) / (M + 1.0)));
  return body + tail;
}

Verdict log_convolution_tail(MollifierKind kind, const std::vector<double>& a_grid, int z_points) {
  if (a_grid.size() < 2) throw std::invalid_argument("log_convolution_tail: need >= 2 values of A");
  const DecayBound bound = mollifier_decay(kind, 1);
  std::vector<TailRow> rows;
  for (double a : a_grid) {
    double sup = 0.0;
    for (int i = 0; i < z_points; ++i) {
      // log-spaced z in [A, 4A], offset so that no node lands on an integer
      const double z = a * std::pow(4.0, (i + 0.5) / z_points);
      sup = std::max(sup, std::abs(log_convolution(kind, z)));
    }
    rows.push_back({a, sup, bound.C * std::log(a) / std::pow(a, 0.75)});
  }
  Verdict v;
  v.name = "log_convolution_tail";
  json jr = json::array();
  bool decreasing = true;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    jr.push_back({{"A", rows[i].a}, {"sup", rows[i].sup}, {"envelope", rows[i].envelope},
                  {"within_envelope", rows[i].sup <= rows[i].envelope}});
    if (i > 0) {
      decreasing = decreasing && rows[i].sup < rows[i - 1].sup;
      worst = std::min(worst, rows[i - 1].sup - rows[i].sup);
    }
  }
  v.value = rows.back().sup;
  v.margin = worst;
  v.budget = 1e-10 * rows.front().sup;
  v.detail = json{{"mollifier", to_string(kind)}, {"C", bound.C}, {"gamma", bound.gamma}, {"z_points", z_points}, {"rows", jr}};
  v.status = decreasing && worst > v.budget ? Status::pass : Status::fail;
  return v;
}

std::pair<GaussianVectorSpec, GaussianVectorSpec> random_convex_pair(int n, Stream& rng) {
  GaussianVectorSpec x, y;
  x.n = y.n = n;
  x.cov.assign(static_cast<std::size_t>(n * n), 0.0);
  std::vector<double> b(static_cast<std::size_t>(n * n));
  for (double& v : b) v = rng.uniform() - 0.3;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += b[static_cast<std::size_t>(i) * n + k] * b[static_cast<std::size_t>(j) * n + k];
      x.cov[static_cast<std::size_t>(i) * n + j] = 0.6 * s / n;
    }
  std::vector<double> vv(n);
  for (double& v : vv) v = 0.2 + 0.4 * rng.uniform();
  y.cov = x.cov;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) y.cov[static_cast<std::size_t>(i) * n + j] += vv[i] * vv[j];
  x.weights.resize(n);
  for (double& w : x.weights) w = 0.2 + 0.8 * rng.uniform();
  y.weights = x.weights;
  return {x, y};
}

std::pair<GaussianVectorSpec, GaussianVectorSpec> random_sup_pair(int n, Stream& rng) {
  std::vector<double> a(static_cast<std::size_t>(n * n));
  for (double& v : a) v = rng.uniform();
  std::vector<double> g(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        g[static_cast<std::size_t>(i) * n + j] += a[static_cast<std::size_t>(i) * n + k] * a[static_cast<std::size_t>(j) * n + k];
  std::vector<double> sd(n);
  for (double& s : sd) s = std::sqrt(0.5 + 1.5 * rng.uniform());
  GaussianVectorSpec x, y;
  x.n = y.n = n;
  y.cov.resize(g.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double corr = g[static_cast<std::size_t>(i) * n + j] /
                          std::sqrt(g[static_cast<std::size_t>(i) * n + i] * g[static_cast<std::size_t>(j) * n + j]);
      y.cov[static_cast<std::size_t>(i) * n + j] = (i == j ? 1.0 : corr) * sd[i] * sd[j];
    }
  const double s = 0.3 + 0.7 * rng.uniform();
  x.cov = y.cov;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) x.cov[static_cast<std::size_t>(i) * n + j] *= 1.0 - s;
  x.weights.assign(n, 1.0);
  y.weights = x.weights;
  return {x, y};
}

json SuiteReport::to_json() const {
  json v = json::array();
  for (const auto& x : verdicts) v.push_back(oracles::to_json(x));
  return json{{"passed", passed}, {"failed", failed}, {"inconclusive", inconclusive}, {"verdicts", v}};
}

SuiteReport run_suite(const SuiteOptions& opt) {
  SuiteReport rep;
  auto add = [&](Verdict v, const std::string& group) {
    v.detail["group"] = group;
    rep.verdicts.push_back(std::move(v));
  };
  Stream rng(opt.seed, 0, 0, StreamTag::oracle);

  // Interpolation derivative.
  {
    GaussianVectorSpec one_x{1, {0.7}, {1.0}}, one_y{1, {0.3}, {1.0}};
    add(interpolation_derivative_check(one_x, one_y, Phi{TestFunction::square, 0.0}, 0.4), "interpolation");
    GaussianVectorSpec two_x{2, {0.5, 0.1, 0.1, 0.5}, {0.6, 0.4}}, two_y{2, {0.5, 0.3, 0.3, 0.5}, {0.6, 0.4}};
    for (double t : {0.25, 0.5, 0.75}) add(interpolation_derivative_check(two_x, two_y, Phi{TestFunction::power, 0.4}, t), "interpolation");
    add(interpolation_derivative_check(two_x, two_x, Phi{TestFunction::power, 0.4}, 0.5), "interpolation");
    for (int i = 0; i < 4; ++i) {
      const int n = 1 + i % 3;
      auto [x, y] = random_convex_pair(n, rng);
      const Phi phi = i % 2 ? Phi{TestFunction::exp_neg, 0.0} : Phi{TestFunction::power, 0.3 + 0.1 * i};
      add(interpolation_derivative_check(x, y, phi, 0.2 + 0.15 * i), "interpolation");
    }
  }
  // Convex comparison on random admissible instances.
  for (int i = 0; i < opt.instances; ++i) {
    const int n = 1 + i % 3;
    auto [x, y] = random_convex_pair(n, rng);
    double total = 0.0;
    for (double w : x.weights) total += w;
    const Phi f = i % 3 == 0 ? Phi{TestFunction::square, 0.0}
                             : (i % 3 == 1 ? Phi{TestFunction::power15, 0.0} : Phi{TestFunction::call, total});
    add(convex_comparison_check(x, y, f, f.kind == TestFunction::call ? 80 : 40, f.kind == TestFunction::call ? 120 : 60),
        "convex_comparison");
  }
  // Sup comparison on random admissible instances.
  for (int i = 0; i < opt.instances; ++i) {
    const int n = 2 + i % 3;
    auto [x, y] = random_sup_pair(n, rng);
    const SupFunction f = i % 3 == 0 ? SupFunction::identity : (i % 3 == 1 ? SupFunction::positive_part : SupFunction::smooth_step);
    add(sup_comparison_check(x, y, f, opt.mc_samples, opt.seed, static_cast<std::uint64_t>(i) + 1), "sup_comparison");
  }
  // Sup-moment growth, both regimes.
  {
    std::vector<std::uint64_t> grid;
    for (int k = 1; k <= 16; ++k) grid.push_back(std::uint64_t{1} << k);
    add(sup_moment_growth(grid, 1.0, 1.5), "sup_moment_growth");
    add(sup_moment_growth(grid, 4.0, 0.9), "sup_moment_growth");
  }
  // Log-convolution tail.
  for (MollifierKind k : {MollifierKind::gaussian, MollifierKind::fejer})
    add(log_convolution_tail(k, {10.0, 100.0, 1000.0}), "log_convolution_tail");

  for (const auto& v : rep.verdicts) {
    if (v.status == Status::pass) ++rep.passed;
    else if (v.status == Status::fail) ++rep.failed;
    else ++rep.inconclusive;
  }
  return rep;
}

}  // namespace gmc::oracles
