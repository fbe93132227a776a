// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "gmc/kernels.hpp"
#include "gmc/rng.hpp"
#include "gmc/stats.hpp"

namespace gmc {

// zeta_p = (d + lambda^2 / 2) p - lambda^2 p^2 / 2.
double zeta(double p, int d, double lambda2);

// Nontrivial root 2d / lambda^2 of zeta_p = d; throws when lambda^2 >= 2d.
double p_star(int d, double lambda2);

// Region masses for a family of scales: mass[c][replica][region]. Regions of
// one replica share a field, so replicas are the unit of resampling.
struct MomentSamples {
  std::vector<double> c;
  std::vector<std::vector<std::vector<double>>> mass;
  bool balls = false;
};

struct ScalingContext {
  int dimension = 1;
  double lambda2 = 0.5;
  double scale = 1.0;       // R
  double grid_step = 0.0;   // h; scales must sit in [8h, R/4]
  int jackknife_groups = 20;
};

struct ScalingPoint {
  double p, c, moment, se;
  bool heavy_tail;  // Var(m^p) infinite in the limit or relative SE above 0.25
};

struct ScalingFit {
  double p;
  double zeta_hat;
  double se;       // grouped jackknife over replicas
  double ci_lo, ci_hi;
  double zeta_analytic;
  double log_prefactor;  // intercept of ln E[m^p] against ln(c/R)
  double r2;
  bool heavy_tail;
};

struct ScalingReport {
  std::vector<ScalingPoint> points;
  std::vector<ScalingFit> fits;
  double c_min = 0.0, c_max = 0.0;
  double decades = 0.0;
  bool range_ok = false;   // >= 4 scales over >= 1.5 decades
  bool concave = true;     // second differences of zeta_hat in p not significantly positive
  std::vector<std::string> warnings;
};

ScalingReport moment_scaling(const MomentSamples& samples, const std::vector<double>& p_list, const ScalingContext& ctx);

// Law of ln m(cA) against ln m(A) + Omega_c on independent ensembles.
struct ScaleInvarianceReport {
  double c = 1.0;
  std::size_t n_small = 0, n_ref = 0;
  double mean_shift = 0.0, mean_shift_se = 0.0, mean_target = 0.0;
  double variance_gain = 0.0, variance_gain_se = 0.0, variance_target = 0.0;
  double variance_small = 0.0, variance_ref = 0.0;
  double ks = 0.0, ks_critical = 0.0;
  double alpha = 0.01;
  bool mean_ok = false, variance_ok = false, ks_ok = false;
  bool pass() const { return mean_ok && variance_ok && ks_ok; }
};

// Throws std::invalid_argument unless the kernel is the pure lambda^2 ln+(R/|x|).
ScaleInvarianceReport scale_invariance_test(const KernelSpec& kernel, double c, const std::vector<double>& log_mass_small,
                                            const std::vector<double>& log_mass_ref, Stream& rng,
                                            int permutations = 1000, double alpha = 0.01);

// One lambda^2 of a degeneracy scan: mass[replica][level] along the ladder.
struct DegeneracyRun {
  double lambda2 = 0.0;
  std::vector<double> eps;
  std::vector<std::vector<double>> mass;
};

struct DegeneracyRow {
  double lambda2;
  std::vector<double> moment;     // E[m^alpha] per level
  std::vector<double> moment_se;
  double exponent;                // b in E[m_eps^alpha] ~ eps^b; b > 0 means the mass shrinks as eps -> 0
  double exponent_se;             // grouped jackknife over replicas
  double predicted;               // d - zeta_alpha when lambda^2 > 2d, else 0
  double last_drift;              // largest relative change over the last two shells
  std::string verdict;            // "degenerate" (exponent > 3 SE), "stable" (drift < 5%) or "undetermined"
};

struct DegeneracyReport {
  int dimension = 1;
  double alpha = 0.5;
  std::vector<DegeneracyRow> rows;
};

DegeneracyReport degeneracy_scan(const std::vector<DegeneracyRun>& runs, int dimension, double alpha,
                                 int jackknife_groups = 20);

// Dissipation samples eps_l[l][replica][center].
struct LognormalityInput {
  std::vector<double> l;
  std::vector<std::vector<std::vector<double>>> value;
  double scale = 1.0;
  double mean_dissipation = 1.0;
};

struct LognormalityRow {
  double l;
  double mean, mean_se;           // E[eps_l]
  double log_variance, log_variance_se;
  double skewness, skewness_se;
  double kurtosis, kurtosis_se;   // excess
};

struct LognormalityReport {
  std::vector<LognormalityRow> rows;
  double slope = 0.0, slope_se = 0.0;
  double intercept = 0.0, intercept_se = 0.0;  // the additive constant A
};

LognormalityReport lognormality_report(const LognormalityInput& in, int jackknife_groups = 20);

}  // namespace gmc
