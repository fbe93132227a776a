// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gmc/quadrature.hpp"

namespace gmc {

// Remainder g of f = lambda^2 ln+(R/r) + g(r).
enum class RemainderKind { zero, constant, table, cone };

struct Remainder {
  RemainderKind kind = RemainderKind::zero;
  double constant = 0.0;     // constant kind
  std::vector<double> r;     // table abscissae, strictly increasing, r[0] >= 0
  std::vector<double> g;     // table values; held constant beyond both ends

  double eval(double radius) const;  // not valid for the cone kind
  double tail() const;               // value for r beyond the table
  double sup_abs() const;
};

struct KernelSpec {
  int dimension = 1;
  double lambda2 = 0.5;
  double scale = 1.0;  // integral scale R, also written T
  Remainder remainder;

  void validate() const;  // throws std::invalid_argument
  bool pure_logplus() const { return remainder.kind == RemainderKind::zero; }
};

enum class MollifierKind { gaussian, fejer };

struct MollifierSpec {
  MollifierKind kind = MollifierKind::gaussian;
  double epsilon = 0.01;

  void validate() const;
};

std::string to_string(MollifierKind k);
MollifierKind mollifier_kind_from_string(const std::string& s);
std::string to_string(RemainderKind k);
RemainderKind remainder_kind_from_string(const std::string& s);

// Value of the kernel at r. The origin is tagged rather than returned as inf.
struct KernelValue {
  double value = 0.0;
  bool singular = false;
};

KernelValue eval_kernel(const KernelSpec& spec, double r);

// Volume of the unit-diameter ball, |B(0,1/2)|, in d = 1..4.
double half_ball_volume(int d);

// Volume of the intersection of two balls of radius a whose centres are r apart.
double lens_volume(int d, double r, double a);

// Cone kernel: lambda^2 / |B(0,1/2)| times the dy dt / t^{d+1} mass of the
// intersection of the truncated cones over 0 and x. The normalisation makes
// the log coefficient exactly lambda^2 in every dimension. The y-integral is
// the lens volume, the t-integral is adaptive quadrature (closed in d = 1).
QuadResult eval_cone_kernel(double lambda2, double T, int d, double r, double rel_tol = 1e-10);

// Cone remainder g = f_cone - lambda^2 ln+(T/r) (lambda^2 = 1), finite at r = 0.
double cone_remainder(int d, double T, double r);

// Spectral density of the cone kernel, written as a positive mixture of
// squared ball transforms so it is nonnegative by construction.
QuadResult cone_kernel_hat(double lambda2, double T, int d, double xi);

// sigma-positive layer f_n(r) of ln+(T/r), d in {1,2}; mu = 1 (d=1) and
// mu = 1/2 (d=2), scaled by 1/mu so that the layers sum to ln+(T/r).
double sigma_positive_layer(int n, int d, double T, double r);

// Mollifier profiles at unit scale: theta(x) with |x| = r, and its radial
// transform theta_hat(s) with theta_hat(0) = 1.
double mollifier_profile(MollifierKind kind, int d, double r);
double mollifier_hat(MollifierKind kind, double s, int d);

// Decay constants (C, gamma) with |theta(x)| (1 + |x|^{d+gamma}) <= C.
struct DecayBound {
  double C;
  double gamma;
};
DecayBound mollifier_decay(MollifierKind kind, int d);

// Largest |s| for which theta_hat(s) is above 1e-17 (or its support edge).
double mollifier_hat_cutoff(MollifierKind kind);

// q_eps(r) = (theta^eps * f)(r) by inverse radial transform of
// f_hat(xi) theta_hat(eps xi).
QuadResult mollified_covariance(const KernelSpec& spec, const MollifierSpec& moll, double r,
                                double abs_tol = 1e-9);

}  // namespace gmc
