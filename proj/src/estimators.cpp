// SPDX-License-Identifier: Apache-2.0
#include "gmc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gmc {

double zeta(double p, int d, double lambda2) { return (d + 0.5 * lambda2) * p - 0.5 * lambda2 * p * p; }

double p_star(int d, double lambda2) {
  if (!(lambda2 > 0.0)) throw std::invalid_argument("p_star: lambda2 must be positive");
  if (lambda2 >= 2.0 * d) throw std::invalid_argument("p_star: lambda2 >= 2d, no p* > 1 exists");
  return 2.0 * d / lambda2;
}

namespace {

// Replica r belongs to group r * G / n, so groups are contiguous and balanced.
int group_of(std::size_t r, std::size_t n, int groups) {
  return static_cast<int>(r * static_cast<std::size_t>(groups) / n);
}

int clamp_groups(int groups, std::size_t n) {
  return static_cast<int>(std::max<std::size_t>(2, std::min<std::size_t>(static_cast<std::size_t>(groups), n)));
}

}  // namespace

ScalingReport moment_scaling(const MomentSamples& s, const std::vector<double>& p_list, const ScalingContext& ctx) {
  const std::size_t nc = s.c.size();
  if (nc < 2 || s.mass.size() != nc) throw std::invalid_argument("moment_scaling: need masses for every scale");
  const std::size_t nrep = s.mass[0].size();
  if (nrep < 2) throw std::invalid_argument("moment_scaling: need at least two replicas");
  for (const auto& col : s.mass)
    if (col.size() != nrep) throw std::invalid_argument("moment_scaling: ragged replica count");
  const double pst = ctx.lambda2 < 2.0 * ctx.dimension ? p_star(ctx.dimension, ctx.lambda2)
                                                       : std::numeric_limits<double>::quiet_NaN();
  for (double p : p_list) {
    if (p > 0.0 && !(p < pst)) {
      std::ostringstream msg;
      msg << "moment_scaling: p = " << p << " is not below p* = " << pst;
      throw std::invalid_argument(msg.str());
    }
    if (p < 0.0 && !s.balls) throw std::invalid_argument("moment_scaling: negative moments need ball regions");
  }
  ScalingReport rep;
  rep.c_min = *std::min_element(s.c.begin(), s.c.end());
  rep.c_max = *std::max_element(s.c.begin(), s.c.end());
  if (ctx.grid_step > 0.0 && rep.c_min < 8.0 * ctx.grid_step * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "moment_scaling: scale " << rep.c_min << " is below 8 grid steps (" << 8.0 * ctx.grid_step << ")";
    throw std::invalid_argument(msg.str());
  }
  if (rep.c_max > 0.25 * ctx.scale * (1.0 + 1e-12)) throw std::invalid_argument("moment_scaling: scale above R/4");
  rep.decades = std::log10(rep.c_max / rep.c_min);
  rep.range_ok = nc >= 4 && rep.decades >= 1.5 - 1e-12;
  if (!rep.range_ok) {
    std::ostringstream msg;
    msg << "fit range has " << nc << " scales over " << rep.decades << " decades (want >= 4 over >= 1.5)";
    rep.warnings.push_back(msg.str());
  }

  const int groups = clamp_groups(ctx.jackknife_groups, nrep);
  std::vector<double> x(nc);
  for (std::size_t k = 0; k < nc; ++k) x[k] = std::log(s.c[k] / ctx.scale);

  for (double p : p_list) {
    // Per-replica average of m^p over its regions, then group sums.
    std::vector<std::vector<double>> per(nc, std::vector<double>(nrep));
    std::vector<std::vector<double>> gsum(nc, std::vector<double>(groups, 0.0));
    std::vector<double> gcount(groups, 0.0);
    for (std::size_t r = 0; r < nrep; ++r) gcount[group_of(r, nrep, groups)] += 1.0;
    bool point_heavy_any = false;
    for (std::size_t k = 0; k < nc; ++k) {
      for (std::size_t r = 0; r < nrep; ++r) {
        const auto& regions = s.mass[k][r];
        if (regions.empty()) throw std::invalid_argument("moment_scaling: replica without regions");
        double a = 0.0;
        for (double m : regions) a += std::pow(m, p);
        per[k][r] = a / static_cast<double>(regions.size());
        gsum[k][group_of(r, nrep, groups)] += per[k][r];
      }
      ScalingPoint pt;
      pt.p = p;
      pt.c = s.c[k];
      pt.moment = stats::mean(per[k]);
      pt.se = stats::standard_error(per[k]);
      pt.heavy_tail = (p > 0.0 && p >= 0.5 * pst) || !std::isfinite(pt.se) || pt.se > 0.25 * std::abs(pt.moment);
      point_heavy_any = point_heavy_any || pt.heavy_tail;
      rep.points.push_back(pt);
    }
    auto fit_for = [&](const std::vector<bool>& keep) {
      std::vector<double> y(nc);
      for (std::size_t k = 0; k < nc; ++k) {
        double a = 0.0, n = 0.0;
        for (int g = 0; g < groups; ++g)
          if (keep[g]) {
            a += gsum[k][g];
            n += gcount[g];
          }
        y[k] = std::log(a / n);
      }
      return stats::ols(x, y);
    };
    const stats::Jackknife jk =
        stats::jackknife(groups, [&](const std::vector<bool>& keep) { return fit_for(keep).slope; });
    const stats::LineFit full = fit_for(std::vector<bool>(groups, true));
    ScalingFit f;
    f.p = p;
    f.zeta_hat = full.slope;
    f.se = jk.standard_error;
    f.ci_lo = f.zeta_hat - 2.0 * f.se;
    f.ci_hi = f.zeta_hat + 2.0 * f.se;
    f.zeta_analytic = zeta(p, ctx.dimension, ctx.lambda2);
    f.log_prefactor = full.intercept;
    f.r2 = full.r2;
    f.heavy_tail = point_heavy_any;
    if (f.heavy_tail) {
      std::ostringstream msg;
      msg << "p = " << p << ": heavy-tailed moments (p >= p*/2 or relative SE > 0.25) at some scale";
      rep.warnings.push_back(msg.str());
    }
    rep.fits.push_back(f);
  }

  std::vector<ScalingFit> sorted = rep.fits;
  std::sort(sorted.begin(), sorted.end(), [](const ScalingFit& a, const ScalingFit& b) { return a.p < b.p; });
  for (std::size_t i = 1; i + 1 < sorted.size(); ++i) {
    const double s1 = (sorted[i].zeta_hat - sorted[i - 1].zeta_hat) / (sorted[i].p - sorted[i - 1].p);
    const double s2 = (sorted[i + 1].zeta_hat - sorted[i].zeta_hat) / (sorted[i + 1].p - sorted[i].p);
    const double gap = std::min(sorted[i].p - sorted[i - 1].p, sorted[i + 1].p - sorted[i].p);
    const double tol = 2.0 * (sorted[i - 1].se + sorted[i].se + sorted[i + 1].se) / gap;
    if (s2 > s1 + tol) rep.concave = false;
  }
  if (!rep.concave) rep.warnings.push_back("fitted zeta_p is not concave in p");
  return rep;
}

ScaleInvarianceReport scale_invariance_test(const KernelSpec& kernel, double c, const std::vector<double>& small,
                                            const std::vector<double>& ref, Stream& rng, int permutations,
                                            double alpha) {
  kernel.validate();
  if (!kernel.pure_logplus())
    throw std::invalid_argument("scale_invariance_test: the kernel has a remainder g != 0; exact scale invariance "
                                "holds only for lambda^2 ln+(R/|x|)");
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("scale_invariance_test: c must be in (0, 1]");
  if (small.size() < 8 || ref.size() < 8) throw std::invalid_argument("scale_invariance_test: need >= 8 samples");
  ScaleInvarianceReport r;
  r.c = c;
  r.alpha = alpha;
  r.n_small = small.size();
  r.n_ref = ref.size();
  const double d = kernel.dimension;
  const double lc = std::log(1.0 / c);
  r.mean_target = -(d + 0.5 * kernel.lambda2) * lc;
  r.variance_target = kernel.lambda2 * lc;
  r.mean_shift = stats::mean(small) - stats::mean(ref);
  r.mean_shift_se = std::sqrt(stats::variance(small) / r.n_small + stats::variance(ref) / r.n_ref);
  r.variance_small = stats::variance(small);
  r.variance_ref = stats::variance(ref);
  r.variance_gain = r.variance_small - r.variance_ref;
  const double vs = stats::variance_standard_error(small), vr = stats::variance_standard_error(ref);
  r.variance_gain_se = std::sqrt(vs * vs + vr * vr);
  r.mean_ok = std::abs(r.mean_shift - r.mean_target) <= 3.0 * r.mean_shift_se;
  r.variance_ok = std::abs(r.variance_gain - r.variance_target) <= 3.0 * r.variance_gain_se;

  // ln m(A) + Omega_c with an independent Omega_c per sample.
  std::vector<double> shifted(ref);
  const double sd = std::sqrt(r.variance_target);
  for (double& v : shifted) v += r.mean_target + sd * rng.normal();
  r.ks = stats::ks_statistic(small, shifted);
  r.ks_critical = permutations > 0 ? stats::ks_permutation_critical(small, shifted, alpha, permutations, rng)
                                   : std::numeric_limits<double>::infinity();
  r.ks_ok = r.ks <= r.ks_critical;
  return r;
}

DegeneracyReport degeneracy_scan(const std::vector<DegeneracyRun>& runs, int dimension, double alpha,
                                 int jackknife_groups) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("degeneracy_scan: alpha must be in (0, 1)");
  DegeneracyReport rep;
  rep.dimension = dimension;
  rep.alpha = alpha;
  for (const auto& run : runs) {
    const std::size_t nrep = run.mass.size();
    const std::size_t nl = run.eps.size();
    if (nrep < 2 || nl < 3) throw std::invalid_argument("degeneracy_scan: need >= 2 replicas and >= 3 levels");
    const int groups = clamp_groups(jackknife_groups, nrep);
    std::vector<std::vector<double>> gsum(nl, std::vector<double>(groups, 0.0));
    std::vector<double> gcount(groups, 0.0);
    DegeneracyRow row;
    row.lambda2 = run.lambda2;
    for (std::size_t k = 0; k < nl; ++k) {
      std::vector<double> col(nrep);
      for (std::size_t r = 0; r < nrep; ++r) {
        if (run.mass[r].size() != nl) throw std::invalid_argument("degeneracy_scan: ragged levels");
        col[r] = std::pow(run.mass[r][k], alpha);
        gsum[k][group_of(r, nrep, groups)] += col[r];
      }
      row.moment.push_back(stats::mean(col));
      row.moment_se.push_back(stats::standard_error(col));
    }
    for (std::size_t r = 0; r < nrep; ++r) gcount[group_of(r, nrep, groups)] += 1.0;
    std::vector<double> x(nl);
    for (std::size_t k = 0; k < nl; ++k) x[k] = std::log(run.eps[k]);
    auto slope = [&](const std::vector<bool>& keep) {
      std::vector<double> y(nl);
      for (std::size_t k = 0; k < nl; ++k) {
        double a = 0.0, n = 0.0;
        for (int g = 0; g < groups; ++g)
          if (keep[g]) {
            a += gsum[k][g];
            n += gcount[g];
          }
        y[k] = std::log(a / n);
      }
      return stats::ols(x, y).slope;
    };
    const stats::Jackknife jk = stats::jackknife(groups, slope);
    row.exponent = jk.estimate;
    row.exponent_se = jk.standard_error;
    row.predicted = run.lambda2 > 2.0 * dimension ? dimension - zeta(alpha, dimension, run.lambda2) : 0.0;
    row.last_drift = 0.0;
    for (std::size_t k = nl - 2; k < nl; ++k)
      row.last_drift = std::max(row.last_drift, std::abs(row.moment[k] - row.moment[k - 1]) / row.moment[k - 1]);
    if (row.exponent > 3.0 * row.exponent_se)
      row.verdict = "degenerate";
    else if (row.last_drift < 0.05)
      row.verdict = "stable";
    else
      row.verdict = "undetermined";
    rep.rows.push_back(row);
  }
  return rep;
}

LognormalityReport lognormality_report(const LognormalityInput& in, int jackknife_groups) {
  const std::size_t nl = in.l.size();
  if (nl < 2 || in.value.size() != nl) throw std::invalid_argument("lognormality_report: need >= 2 scales");
  const std::size_t nrep = in.value[0].size();
  if (nrep < 4) throw std::invalid_argument("lognormality_report: need >= 4 replicas");
  const int groups = clamp_groups(jackknife_groups, nrep);

  auto pooled = [&](std::size_t k, const std::vector<bool>& keep, bool logs) {
    std::vector<double> out;
    for (std::size_t r = 0; r < nrep; ++r) {
      if (!keep[group_of(r, nrep, groups)]) continue;
      for (double v : in.value[k][r]) out.push_back(logs ? std::log(v) : v);
    }
    return out;
  };

  LognormalityReport rep;
  std::vector<double> x(nl);
  for (std::size_t k = 0; k < nl; ++k) {
    x[k] = std::log(in.scale / in.l[k]);
    LognormalityRow row;
    row.l = in.l[k];
    // Mean dissipation: replicas are independent, centres within one are not.
    std::vector<double> per(nrep);
    for (std::size_t r = 0; r < nrep; ++r) {
      if (in.value[k][r].empty()) throw std::invalid_argument("lognormality_report: replica without samples");
      per[r] = stats::mean(in.value[k][r]);
    }
    row.mean = stats::mean(per);
    row.mean_se = stats::standard_error(per);
    auto jk = [&](auto fn) { return stats::jackknife(groups, [&](const std::vector<bool>& keep) { return fn(stats::moments(pooled(k, keep, true))); }); };
    const auto v = jk([](const stats::Moments& m) { return m.variance; });
    const auto s = jk([](const stats::Moments& m) { return m.skewness; });
    const auto q = jk([](const stats::Moments& m) { return m.excess_kurtosis; });
    row.log_variance = v.estimate;
    row.log_variance_se = v.standard_error;
    row.skewness = s.estimate;
    row.skewness_se = s.standard_error;
    row.kurtosis = q.estimate;
    row.kurtosis_se = q.standard_error;
    rep.rows.push_back(row);
  }
  auto fit = [&](const std::vector<bool>& keep) {
    std::vector<double> y(nl);
    for (std::size_t k = 0; k < nl; ++k) y[k] = stats::variance(pooled(k, keep, true));
    return stats::ols(x, y);
  };
  const auto full = fit(std::vector<bool>(groups, true));
  rep.slope = full.slope;
  rep.intercept = full.intercept;
  rep.slope_se = stats::jackknife(groups, [&](const std::vector<bool>& keep) { return fit(keep).slope; }).standard_error;
  rep.intercept_se =
      stats::jackknife(groups, [&](const std::vector<bool>& keep) { return fit(keep).intercept; }).standard_error;
  return rep;
}

}  // namespace gmc
