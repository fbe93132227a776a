// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmc/kernels.hpp"
#include "gmc/rng.hpp"

namespace gmc::oracles {

// Centred Gaussian vector with weights p_i > 0; covariance row-major n x n.
struct GaussianVectorSpec {
  int n = 1;
  std::vector<double> cov;
  std::vector<double> weights;

  double at(int i, int j) const { return cov[static_cast<std::size_t>(i) * n + j]; }
  void validate() const;  // symmetric, eigenvalues >= -1e-12, weights > 0
};

enum class Status { pass, fail, inconclusive };
std::string to_string(Status s);

// Every verdict carries the error budget it was judged against: a check
// passes or fails only when |margin| exceeds the budget.
struct Verdict {
  std::string name;
  Status status = Status::inconclusive;
  double value = 0.0;
  double margin = 0.0;
  double budget = 0.0;
  nlohmann::json detail = nlohmann::json::object();
};
nlohmann::json to_json(const Verdict& v);

// E[h(X)] for X ~ N(0, cov), tensor Gauss-Hermite of the given order on the
// principal axes (n <= 3).
double gaussian_expectation(const std::vector<double>& cov, int n, int order,
                            const std::function<double(const double*)>& h);

enum class TestFunction { power, exp_neg, square, call, power15 };
std::string to_string(TestFunction f);

struct Phi {
  TestFunction kind = TestFunction::square;
  double a = 0.5;  // exponent for power, strike for call
  double value(double u) const;
  double second(double u) const;  // not defined for call
};

struct InterpolationOptions {
  int order = 40;
  int check_order = 60;
  double step = 1e-3;  // central difference step in t
};

// Interpolation: derivative of t -> E[phi(W_t)] by finite differences against the
// closed expression, both under Gauss-Hermite quadrature.
Verdict interpolation_derivative_check(const GaussianVectorSpec& x, const GaussianVectorSpec& y, const Phi& phi,
                                       double t, const InterpolationOptions& opt = {});

// Convex comparison: E[F(sum p_i e^{X_i - E X_i^2 / 2})] <= same with Y when cov X <= cov Y entrywise.
Verdict convex_comparison_check(const GaussianVectorSpec& x, const GaussianVectorSpec& y, const Phi& f,
                                int order = 40, int check_order = 60);

enum class SupFunction { identity, positive_part, smooth_step };
std::string to_string(SupFunction f);

// Sup comparison: E[F(max Y_i)] <= E[F(max X_i)] with equal diagonals and
// off-diagonals of X below those of Y. Paired Monte Carlo (same normals for
// both vectors); n = 2 with F = identity uses the closed form.
Verdict sup_comparison_check(const GaussianVectorSpec& x, const GaussianVectorSpec& y, SupFunction f,
                             std::uint64_t samples, std::uint64_t seed, std::uint64_t instance);

// Sup-moment growth: log-log slope of E[max_i e^{p X_i - p lambda^2 ln(n) / 2}] over a
// geometric n grid for n iid N(0, lambda^2 ln n), by one-dimensional quadrature
// of the law of the maximum.
double sup_moment_expectation(std::uint64_t n, double lambda2, double p);
Verdict sup_moment_growth(const std::vector<std::uint64_t>& n_grid, double lambda2, double p);

// Log-convolution tail in d = 1: I(z) = int |theta(v)| ln|z / (z - v)| dv for the unit
// mollifier profile, and the supremum of |I| over z in [A, 4A].
double log_convolution(MollifierKind kind, double z);
struct TailRow {
  double a;
  double sup;
  double envelope;  // C ln(A) / A^{3/4}: the proof's bound shape in d = 1, gamma = 1
};
Verdict log_convolution_tail(MollifierKind kind, const std::vector<double>& a_grid, int z_points = 64);

// Random admissible pairs. Convex comparison: Y = X + v v^T
// with v >= 0. Sup comparison: X = (1 - s) Y + s I with Y a correlation matrix with
// nonnegative entries.
std::pair<GaussianVectorSpec, GaussianVectorSpec> random_convex_pair(int n, Stream& rng);
std::pair<GaussianVectorSpec, GaussianVectorSpec> random_sup_pair(int n, Stream& rng);

struct SuiteOptions {
  std::uint64_t seed = 1;
  std::uint64_t mc_samples = 1000000;
  int instances = 20;
};

struct SuiteReport {
  std::vector<Verdict> verdicts;
  int passed = 0, failed = 0, inconclusive = 0;
  nlohmann::json to_json() const;
};

SuiteReport run_suite(const SuiteOptions& opt);

}  // namespace gmc::oracles
