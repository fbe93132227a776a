// SPDX-License-Identifier: Apache-2.0
#include "gmc/quadrature.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace gmc {
namespace {

// Kronrod nodes from boost; the embedded Gauss weights are mapped onto the
// Kronrod abscissae they share so each panel costs 21 evaluations.
struct Gk21 {
  std::vector<double> x;   // x[0] = 0, then positive nodes
  std::vector<double> wk;  // Kronrod weights
  std::vector<double> wg;  // Gauss weights on the same nodes (0 if not shared)

  Gk21() {
    using K = boost::math::quadrature::gauss_kronrod<double, 21>;
    using G = boost::math::quadrature::gauss<double, 10>;
    const auto& kx = K::abscissa();
    const auto& kw = K::weights();
    const auto& gx = G::abscissa();
    const auto& gw = G::weights();
    x.assign(kx.begin(), kx.end());
    wk.assign(kw.begin(), kw.end());
    wg.assign(x.size(), 0.0);
    for (std::size_t j = 0; j < gx.size(); ++j) {
      bool found = false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i] - gx[j]) < 1e-14) {
          wg[i] = gw[j];
          found = true;
        }
      }
      if (!found) throw std::logic_error("gauss node missing from kronrod set");
    }
  }
};

const Gk21& rule() {
  static const Gk21 r;
  return r;
}

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel make_panel(const ScalarFn& f, double a, double b) {
  const auto& r = rule();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = r.wk[0] * fc;
  double g = r.wg[0] * fc;
  double kabs = std::abs(k);
  std::array<double, 22> fv{};
  for (std::size_t i = 1; i < r.x.size(); ++i) {
    const double f1 = f(c - h * r.x[i]);
    const double f2 = f(c + h * r.x[i]);
    fv[2 * i] = f1;
    fv[2 * i + 1] = f2;
    k += r.wk[i] * (f1 + f2);
    g += r.wg[i] * (f1 + f2);
    kabs += r.wk[i] * (std::abs(f1) + std::abs(f2));
  }
  // QUADPACK-style error estimate.
  const double mean = 0.5 * k;
  double asc = r.wk[0] * std::abs(fc - mean);
  for (std::size_t i = 1; i < r.x.size(); ++i)
    asc += r.wk[i] * (std::abs(fv[2 * i] - mean) + std::abs(fv[2 * i + 1] - mean));
  const double value = k * h;
  asc *= std::abs(h);
  kabs *= std::abs(h);
  double err = std::abs((k - g) * h);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (kabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * kabs, err);
  return {a, b, value, err};
}

}  // namespace

QuadResult gauss_kronrod_panel(const ScalarFn& f, double a, double b) {
  const Panel p = make_panel(f, a, b);
  return {p.value, p.error, true, 21};
}

QuadResult integrate_panels(const ScalarFn& f, const std::vector<double>& breaks,
                            const QuadOptions& opt) {
  if (breaks.size() < 2) throw std::invalid_argument("integrate_panels: need at least two breakpoints");
  std::priority_queue<Panel> heap;
  double value = 0.0;
  double error = 0.0;
  long evals = 0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] >= breaks[i])) throw std::invalid_argument("integrate_panels: breakpoints must be sorted");
    if (breaks[i + 1] == breaks[i]) continue;
    Panel p = make_panel(f, breaks[i], breaks[i + 1]);
    evals += 21;
    value += p.value;
    error += p.error;
    heap.push(p);
  }
  QuadResult out;
  int panels = static_cast<int>(heap.size());
  const int budget = std::max(opt.max_panels, panels + 1);
  while (!heap.empty()) {
    if (error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
      out.converged = true;
      break;
    }
    if (panels >= budget) break;
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // cannot split further
    heap.pop();
    Panel left = make_panel(f, worst.a, mid);
    Panel right = make_panel(f, mid, worst.b);
    evals += 42;
    ++panels;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Resum to shed the drift of the incremental updates.
  value = 0.0;
  error = 0.0;
  std::vector<Panel> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  for (const auto& p : all) {
    value += p.value;
    error += p.error;
  }
  out.value = value;
  out.error = error;
  out.evaluations = evals;
  if (!out.converged) out.converged = error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
  return out;
}

QuadResult integrate(const ScalarFn& f, double a, double b, const QuadOptions& opt) {
  if (a == b) return {0.0, 0.0, true, 0};
  if (a > b) {
    QuadResult r = integrate(f, b, a, opt);
    r.value = -r.value;
    return r;
  }
  return integrate_panels(f, {a, b}, opt);
}

}  // namespace gmc
