// SPDX-License-Identifier: Apache-2.0
#include "gmc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gmc::stats {

double mean(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("mean: empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
  if (x.size() < 2) throw std::invalid_argument("variance: need at least two values");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double standard_error(const std::vector<double>& x) { return std::sqrt(variance(x) / static_cast<double>(x.size())); }

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const std::size_t i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= x.size()) return x.back();
  const double f = pos - static_cast<double>(i);
  return (1.0 - f) * x[i] + f * x[i + 1];
}

double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

Moments moments(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 4) throw std::invalid_argument("moments: need at least four values");
  const double m = mean(x);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  return {m, m2 * n / (n - 1.0), m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

double variance_standard_error(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double m = mean(x);
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - m;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  const double s2 = m2 * n / (n - 1.0);
  return std::sqrt(std::max(m4 - s2 * s2 * (n - 3.0) / (n - 1.0), 0.0) / n);
}

LineFit wls(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n || w.size() != n) throw std::invalid_argument("fit: need matching samples, n >= 2");
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
    syy += w[i] * (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit: abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    rss += w[i] * r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
  f.slope_se = n > 2 ? std::sqrt(rss / (static_cast<double>(n) - 2.0) / sxx) : 0.0;
  return f;
}

LineFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  return wls(x, y, std::vector<double>(x.size(), 1.0));
}

Jackknife jackknife(int groups, const std::function<double(const std::vector<bool>&)>& estimate) {
  if (groups < 2) throw std::invalid_argument("jackknife: need at least two groups");
  std::vector<bool> keep(groups, true);
  Jackknife j;
  j.estimate = estimate(keep);
  std::vector<double> leave(groups);
  for (int g = 0; g < groups; ++g) {
    keep[g] = false;
    leave[g] = estimate(keep);
    keep[g] = true;
  }
  const double m = mean(leave);
  double s = 0.0;
  for (double v : leave) s += (v - m) * (v - m);
  j.standard_error = std::sqrt(s * (groups - 1.0) / groups);
  return j;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_permutation_critical(const std::vector<double>& a, const std::vector<double>& b, double alpha,
                               int permutations, Stream& rng) {
  std::vector<double> pool(a);
  pool.insert(pool.end(), b.begin(), b.end());
  std::vector<double> stat(permutations);
  for (int p = 0; p < permutations; ++p) {
    // Fisher-Yates on the pooled sample.
    for (std::size_t i = pool.size() - 1; i > 0; --i) std::swap(pool[i], pool[rng.below(i + 1)]);
    std::vector<double> x(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(a.size()));
    std::vector<double> y(pool.begin() + static_cast<std::ptrdiff_t>(a.size()), pool.end());
    stat[p] = ks_statistic(std::move(x), std::move(y));
  }
  return quantile(stat, 1.0 - alpha);
}

}  // namespace gmc::stats
