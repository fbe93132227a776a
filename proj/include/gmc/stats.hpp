// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "gmc/rng.hpp"

namespace gmc::stats {

// All reductions run in index order so reports are bit-stable.
double mean(const std::vector<double>& x);
double variance(const std::vector<double>& x);  // unbiased
double standard_error(const std::vector<double>& x);
double median(std::vector<double> x);
double quantile(std::vector<double> x, double q);

struct Moments {
  double mean, variance, skewness, excess_kurtosis;
};
Moments moments(const std::vector<double>& x);

// Standard error of the sample variance, sqrt((m4 - s^4 (n-3)/(n-1)) / n).
double variance_standard_error(const std::vector<double>& x);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;      // from residuals; 0 for an exact two-point fit
  double r2 = 0.0;
};
LineFit ols(const std::vector<double>& x, const std::vector<double>& y);
LineFit wls(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w);

// Delete-one-group jackknife: `estimate(keep)` receives a mask over groups.
struct Jackknife {
  double estimate = 0.0;
  double standard_error = 0.0;
};
Jackknife jackknife(int groups, const std::function<double(const std::vector<bool>&)>& estimate);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Critical value at level alpha from random relabelings of the pooled sample.
double ks_permutation_critical(const std::vector<double>& a, const std::vector<double>& b, double alpha,
                               int permutations, Stream& rng);

}  // namespace gmc::stats
