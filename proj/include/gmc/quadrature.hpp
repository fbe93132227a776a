// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

namespace gmc {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
  long evaluations = 0;
};

struct QuadOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_panels = 20000;
};

using ScalarFn = std::function<double(double)>;

// Globally adaptive 21-point Gauss-Kronrod integration over [a, b]. The
// worst panel is bisected until the summed error estimate meets
// max(abs_tol, rel_tol * |value|) or the panel budget runs out.
QuadResult integrate(const ScalarFn& f, double a, double b, const QuadOptions& opt = {});

// Same, seeded with the given breakpoints (sorted, first and last are the
// integration limits). Breakpoints at kinks or oscillation nodes let the
// adaptive loop start from panels on which the integrand is smooth.
QuadResult integrate_panels(const ScalarFn& f, const std::vector<double>& breaks,
                            const QuadOptions& opt = {});

// Single GK21 panel, exposed for tests.
QuadResult gauss_kronrod_panel(const ScalarFn& f, double a, double b);

}  // namespace gmc
