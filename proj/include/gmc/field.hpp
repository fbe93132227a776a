// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gmc/kernels.hpp"

namespace gmc {

struct GridSpec {
  int dimension = 1;
  int n = 1024;          // points per side, power of two
  double length = 4.0;   // side L
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  double step() const { return length / n; }
  std::size_t cells() const;
  void validate() const;
};

// Wrap-around exclusion: L >= 2R + extent of the region of interest.
void require_periodization_margin(const GridSpec& grid, const KernelSpec& kernel, double extent);

// eps_0 > eps_1 > ... > eps_K. Layer 0 is the base shell f_hat theta_hat(eps_0 .),
// layer k + 1 is shell k, f_hat (theta_hat(eps_{k+1} .) - theta_hat(eps_k .)).
struct ShellLadder {
  KernelSpec kernel;
  MollifierKind mollifier = MollifierKind::gaussian;
  std::vector<double> eps;

  int shells() const { return static_cast<int>(eps.size()) - 1; }
  double base_weight(double xi) const;
  double shell_weight(int k, double xi) const;
  double cumulative_weight(int level, double xi) const;  // f_hat theta_hat(eps_level .)
  std::string digest() const;
};

std::vector<double> geometric_schedule(double eps0, int shells);

// Checks the schedule and that f_hat and every shell weight are nonnegative
// (to -1e-12 relative) on a log-spaced probe grid.
ShellLadder build_ladder(const KernelSpec& kernel, MollifierKind mollifier, const std::vector<double>& schedule);

struct FieldSample {
  GridSpec grid;
  int level = 0;              // the field is X_{eps_level}
  double eps = 0.0;
  std::vector<double> values; // row-major, last index fastest
  double variance = 0.0;      // exact variance of the discrete field
  double continuum_variance = 0.0;  // q_eps(0); 0 when no closed-form spectrum
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  std::vector<std::uint32_t> streams;  // shell stream ids folded in so far
  std::string ladder_digest;
};

struct SynthesisDiagnostics {
  double clipped_negative_mass = 0.0;
  double trace = 0.0;
  double nyquist_theta_hat = 0.0;
};

// Spectral synthesis on the periodic grid. Each layer's discrete spectrum
// s_j = w(|xi_j|) / L^d is tabulated once; a sample is the backward real FFT
// of sqrt(s_j) times Hermitian complex white noise drawn from the layer's own
// counter-based stream, so shells are independent and order-free.
class FieldSynthesizer {
 public:
  FieldSynthesizer(const ShellLadder& ladder, const GridSpec& grid);
  ~FieldSynthesizer();
  FieldSynthesizer(const FieldSynthesizer&) = delete;
  FieldSynthesizer& operator=(const FieldSynthesizer&) = delete;

  const ShellLadder& ladder() const { return ladder_; }
  const GridSpec& grid() const { return grid_; }
  int levels() const { return ladder_.shells() + 1; }

  FieldSample synthesize(std::uint64_t seed, std::uint64_t replica, int level) const;
  void refine(FieldSample& sample) const;

  // Field of a single layer (0 = base, k + 1 = shell k), for martingale tests.
  std::vector<double> layer_field(std::uint64_t seed, std::uint64_t replica, int layer) const;

  double layer_variance(int layer) const { return layer_variance_.at(layer); }
  double discrete_variance(int level) const;
  const SynthesisDiagnostics& diagnostics() const { return diag_; }

  // Exact discrete covariance at an integer lag along the first axis.
  double discrete_covariance(int level, int lag_cells) const;

 private:
  void accumulate_layer(std::complex<double>* spec, std::uint64_t seed, std::uint64_t replica, int layer) const;
  void backward(std::complex<double>* spec, double* out) const;

  ShellLadder ladder_;
  GridSpec grid_;
  std::size_t real_size_ = 0;
  std::size_t complex_size_ = 0;
  std::vector<std::vector<double>> amp_;      // sqrt(s_j) per layer
  std::vector<double> multiplicity_;          // 1 or 2 per half-complex bin
  std::vector<std::int64_t> partner_;         // conjugate partner or -1 (self) / -2 (none)
  std::vector<double> layer_variance_;
  std::vector<double> continuum_variance_;
  SynthesisDiagnostics diag_;
  void* plan_ = nullptr;
};

}  // namespace gmc
