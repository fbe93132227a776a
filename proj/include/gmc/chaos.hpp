// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gmc/field.hpp"
#include "gmc/rng.hpp"

namespace gmc {

struct ChaosMeasure {
  GridSpec grid;
  double eps = 0.0;
  int level = 0;
  std::vector<double> mass;  // per cell, same layout as the field
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  std::string ladder_digest;
};

struct Box {
  std::array<double, 3> lo{0.0, 0.0, 0.0};
  std::array<double, 3> hi{1.0, 1.0, 1.0};
};

struct Ball {
  std::array<double, 3> center{0.0, 0.0, 0.0};
  double radius = 0.5;
};

// Midpoint rule: mass = exp(X(center) - variance / 2) * h^d.
ChaosMeasure exponentiate(const FieldSample& sample);

double total_mass(const ChaosMeasure& m);

// Boundary cells count with their covered volume fraction (exact for boxes,
// 3^d subsampling for balls). The region must stay `margin` away from the
// grid edges; pass the mollifier scale.
double region_mass(const ChaosMeasure& m, const Box& box, double margin);
double region_mass(const ChaosMeasure& m, const Ball& ball, double margin);

// Masses of the aligned blocks of b cells per side tiling the whole grid.
std::vector<double> block_masses(const ChaosMeasure& m, int b);

// Per-level masses of one region along the ladder for a range of replicas.
struct ConvergenceTrace {
  std::vector<double> eps;
  std::vector<std::vector<double>> mass;  // [replica][level]
  std::vector<double> mean;
  std::vector<double> median;
  std::vector<double> relative_change;    // |median_k - median_{k-1}| / median_{k-1}
  bool plateau = false;
};

ConvergenceTrace convergence_trace(const FieldSynthesizer& synth, std::uint64_t seed, std::uint64_t first_replica,
                                   int replicas, const Box& region, double plateau_tol = 0.05);

// Multifractal random walk X(t) = B(m[t0, t0 + t]) sampled at the given
// times (sorted, starting >= 0). Within a cell the cumulative mass is linear.
std::vector<double> mrw_path(const ChaosMeasure& m, double t0, const std::vector<double>& times, Stream& brownian);

// Cumulative mass m[t0, t0 + t] for each t (d = 1).
std::vector<double> cumulative_mass(const ChaosMeasure& m, double t0, const std::vector<double>& times);

struct DissipationSample {
  std::array<double, 3> center;
  double l;
  double mean_dissipation;
  double value;
};

std::vector<DissipationSample> dissipation_samples(const ChaosMeasure& m, const std::vector<std::array<double, 3>>& centers,
                                                   double l, double mean_dissipation, double margin);

}  // namespace gmc
