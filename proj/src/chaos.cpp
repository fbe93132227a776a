// SPDX-License-Identifier: Apache-2.0
#include "gmc/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gmc {

namespace {

struct AxisRange {
  int first = 0;
  int last = 0;                  // inclusive
  std::vector<double> fraction;  // covered fraction per cell in [first, last]
};

std::size_t stride_of(const GridSpec& g, int axis) {
  std::size_t s = 1;
  for (int a = axis + 1; a < g.dimension; ++a) s *= static_cast<std::size_t>(g.n);
  return s;
}

void require_interior(const GridSpec& g, double lo, double hi, double margin, int axis) {
  const double o = g.origin[axis];
  if (lo < o + margin || hi > o + g.length - margin || hi < lo) {
    std::ostringstream msg;
    msg << "region: axis " << axis << " span [" << lo << ", " << hi << "] leaves the interior [" << o + margin
        << ", " << o + g.length - margin << "]";
    throw std::invalid_argument(msg.str());
  }
}

AxisRange axis_range(const GridSpec& g, int axis, double lo, double hi) {
  const double h = g.step();
  const double o = g.origin[axis];
  AxisRange r;
  r.first = std::max(0, static_cast<int>(std::floor((lo - o) / h)));
  r.last = std::min(g.n - 1, static_cast<int>(std::ceil((hi - o) / h)) - 1);
  if (r.last < r.first) r.last = r.first;
  for (int i = r.first; i <= r.last; ++i) {
    const double a = std::max(lo, o + i * h);
    const double b = std::min(hi, o + (i + 1) * h);
    r.fraction.push_back(std::max(0.0, b - a) / h);
  }
  return r;
}

}  // namespace

ChaosMeasure exponentiate(const FieldSample& sample) {
  ChaosMeasure m;
  m.grid = sample.grid;
  m.eps = sample.eps;
  m.level = sample.level;
  m.seed = sample.seed;
  m.replica = sample.replica;
  m.ladder_digest = sample.ladder_digest;
  const double cell = std::pow(sample.grid.step(), sample.grid.dimension);
  const double shift = 0.5 * sample.variance;
  m.mass.resize(sample.values.size());
  for (std::size_t i = 0; i < sample.values.size(); ++i) m.mass[i] = cell * std::exp(sample.values[i] - shift);
  return m;
}

double total_mass(const ChaosMeasure& m) {
  double s = 0.0;
  for (double v : m.mass) s += v;
  return s;
}

double region_mass(const ChaosMeasure& m, const Box& box, double margin) {
  const GridSpec& g = m.grid;
  const int d = g.dimension;
  std::array<AxisRange, 3> ax;
  for (int a = 0; a < 3; ++a) {
    if (a < d) {
      require_interior(g, box.lo[a], box.hi[a], margin, a);
      ax[a] = axis_range(g, a, box.lo[a], box.hi[a]);
    } else {
      ax[a].fraction = {1.0};
    }
  }
  const std::size_t s0 = d > 0 ? stride_of(g, 0) : 0;
  const std::size_t s1 = d > 1 ? stride_of(g, 1) : 0;
  const std::size_t s2 = d > 2 ? stride_of(g, 2) : 0;
  double total = 0.0;
  for (int i = ax[0].first; i <= ax[0].last; ++i) {
    const double f0 = ax[0].fraction[i - ax[0].first];
    if (f0 == 0.0) continue;
    for (int j = ax[1].first; j <= ax[1].last; ++j) {
      const double f1 = f0 * ax[1].fraction[j - ax[1].first];
      if (f1 == 0.0) continue;
      double row = 0.0;
      const std::size_t base = i * s0 + j * s1;
      for (int k = ax[2].first; k <= ax[2].last; ++k) row += ax[2].fraction[k - ax[2].first] * m.mass[base + k * s2];
      total += f1 * row;
    }
  }
  return total;
}

double region_mass(const ChaosMeasure& m, const Ball& ball, double margin) {
  const GridSpec& g = m.grid;
  const int d = g.dimension;
  const double h = g.step();
  const double r = ball.radius;
  if (!(r > 0.0)) throw std::invalid_argument("region: ball radius must be positive");
  std::array<int, 3> first{0, 0, 0}, last{0, 0, 0};
  for (int a = 0; a < d; ++a) {
    require_interior(g, ball.center[a] - r, ball.center[a] + r, margin, a);
    const AxisRange ar = axis_range(g, a, ball.center[a] - r, ball.center[a] + r);
    first[a] = ar.first;
    last[a] = ar.last;
  }
  std::array<std::size_t, 3> stride{0, 0, 0};
  for (int a = 0; a < d; ++a) stride[a] = stride_of(g, a);
  const int sub = 3;
  const double r2 = r * r;
  int sub_total = 1;
  for (int a = 0; a < d; ++a) sub_total *= sub;
  double total = 0.0;
  std::array<int, 3> i{0, 0, 0};
  for (i[0] = first[0]; i[0] <= last[0]; ++i[0])
    for (i[1] = first[1]; i[1] <= last[1]; ++i[1])
      for (i[2] = first[2]; i[2] <= last[2]; ++i[2]) {
        double near2 = 0.0, far2 = 0.0;
        std::array<double, 3> lo{};
        for (int a = 0; a < d; ++a) {
          lo[a] = g.origin[a] + i[a] * h;
          const double c = ball.center[a];
          const double dn = c < lo[a] ? lo[a] - c : (c > lo[a] + h ? c - lo[a] - h : 0.0);
          const double df = std::max(std::abs(c - lo[a]), std::abs(c - lo[a] - h));
          near2 += dn * dn;
          far2 += df * df;
        }
        if (near2 >= r2) continue;
        std::size_t idx = 0;
        for (int a = 0; a < d; ++a) idx += i[a] * stride[a];
        if (far2 <= r2) {
          total += m.mass[idx];
          continue;
        }
        int inside = 0;
        for (int s = 0; s < sub_total; ++s) {
          int code = s;
          double dist2 = 0.0;
          for (int a = 0; a < d; ++a) {
            const int k = code % sub;
            code /= sub;
            const double x = lo[a] + (k + 0.5) * h / sub - ball.center[a];
            dist2 += x * x;
          }
          if (dist2 <= r2) ++inside;
        }
        total += m.mass[idx] * inside / sub_total;
      }
  return total;
}

std::vector<double> block_masses(const ChaosMeasure& m, int b) {
  const GridSpec& g = m.grid;
  if (b < 1 || g.n % b != 0) throw std::invalid_argument("block_masses: block must divide the grid side");
  const int d = g.dimension;
  const int nb = g.n / b;
  std::size_t blocks = 1;
  for (int a = 0; a < d; ++a) blocks *= static_cast<std::size_t>(nb);
  std::vector<double> out(blocks, 0.0);
  const std::size_t n = static_cast<std::size_t>(g.n);
  if (d == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i / b] += m.mass[i];
  } else if (d == 2) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out[(i / b) * nb + j / b] += m.mass[i * n + j];
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t row = (i / b) * nb * nb + (j / b) * nb;
        const double* p = &m.mass[(i * n + j) * n];
        for (std::size_t k = 0; k < n; ++k) out[row + k / b] += p[k];
      }
  }
  return out;
}

ConvergenceTrace convergence_trace(const FieldSynthesizer& synth, std::uint64_t seed, std::uint64_t first_replica,
                                   int replicas, const Box& region, double plateau_tol) {
  ConvergenceTrace t;
  const int levels = synth.levels();
  t.eps = synth.ladder().eps;
  t.mass.assign(replicas, std::vector<double>(levels));
  for (int r = 0; r < replicas; ++r) {
    FieldSample s = synth.synthesize(seed, first_replica + r, 0);
    for (int k = 0; k < levels; ++k) {
      if (k > 0) synth.refine(s);
      t.mass[r][k] = region_mass(exponentiate(s), region, s.eps);
    }
  }
  t.mean.assign(levels, 0.0);
  t.median.assign(levels, 0.0);
  for (int k = 0; k < levels; ++k) {
    std::vector<double> col(replicas);
    for (int r = 0; r < replicas; ++r) col[r] = t.mass[r][k];
    double s = 0.0;
    for (double v : col) s += v;
    t.mean[k] = replicas > 0 ? s / replicas : 0.0;
    if (replicas > 0) {
      std::sort(col.begin(), col.end());
      t.median[k] = replicas % 2 ? col[replicas / 2] : 0.5 * (col[replicas / 2 - 1] + col[replicas / 2]);
    }
  }
  for (int k = 1; k < levels; ++k)
    t.relative_change.push_back(std::abs(t.median[k] - t.median[k - 1]) / std::abs(t.median[k - 1]));
  const std::size_t nc = t.relative_change.size();
  t.plateau = nc >= 2 && t.relative_change[nc - 1] < plateau_tol && t.relative_change[nc - 2] < plateau_tol;
  return t;
}

std::vector<double> cumulative_mass(const ChaosMeasure& m, double t0, const std::vector<double>& times) {
  const GridSpec& g = m.grid;
  if (g.dimension != 1) throw std::invalid_argument("cumulative_mass: the measure must be one-dimensional");
  if (times.empty()) return {};
  const double h = g.step();
  const double o = g.origin[0];
  if (t0 < o || t0 + times.back() > o + g.length)
    throw std::invalid_argument("cumulative_mass: time window leaves the grid");
  std::vector<double> prefix(m.mass.size() + 1, 0.0);
  for (std::size_t i = 0; i < m.mass.size(); ++i) prefix[i + 1] = prefix[i] + m.mass[i];
  auto at = [&](double x) {
    const double u = (x - o) / h;
    std::size_t i = static_cast<std::size_t>(std::floor(u));
    if (i >= m.mass.size()) return prefix.back();
    return prefix[i] + (u - static_cast<double>(i)) * m.mass[i];
  };
  const double start = at(t0);
  std::vector<double> out(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) out[k] = at(t0 + times[k]) - start;
  return out;
}

std::vector<double> mrw_path(const ChaosMeasure& m, double t0, const std::vector<double>& times, Stream& brownian) {
  for (std::size_t k = 1; k < times.size(); ++k)
    if (times[k] < times[k - 1]) throw std::invalid_argument("mrw_path: times must be sorted");
  if (!times.empty() && times.front() < 0.0) throw std::invalid_argument("mrw_path: times must be >= 0");
  const std::vector<double> cum = cumulative_mass(m, t0, times);
  std::vector<double> x(times.size());
  double prev_mass = 0.0;
  double value = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double dm = std::max(cum[k] - prev_mass, 0.0);
    value += std::sqrt(dm) * brownian.normal();
    x[k] = value;
    prev_mass = cum[k];
  }
  return x;
}

std::vector<DissipationSample> dissipation_samples(const ChaosMeasure& m, const std::vector<std::array<double, 3>>& centers,
                                                   double l, double mean_dissipation, double margin) {
  if (m.grid.dimension != 3) throw std::invalid_argument("dissipation: the measure must be three-dimensional");
  if (!(l > 0.0)) throw std::invalid_argument("dissipation: l must be positive");
  const double volume = 4.0 / 3.0 * M_PI * l * l * l;
  std::vector<DissipationSample> out;
  out.reserve(centers.size());
  for (const auto& c : centers) {
    const double mass = region_mass(m, Ball{c, l}, margin);
    out.push_back({c, l, mean_dissipation, mean_dissipation * mass / volume});
  }
  return out;
}

}  // namespace gmc
