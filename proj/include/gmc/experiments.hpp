// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gmc/chaos.hpp"
#include "gmc/estimators.hpp"
#include "gmc/field.hpp"
#include "gmc/io.hpp"
#include "gmc/oracles.hpp"
#include "gmc/spectral.hpp"

namespace gmc::experiments {

using nlohmann::json;

// Runs fn(i) for i in [0, count) on up to `threads` workers. Results land in
// slot i, so any later reduction in index order is independent of scheduling.
template <class T>
std::vector<T> map_indexed(int count, int threads, const std::function<T(int)>& fn) {
  std::vector<T> out(static_cast<std::size_t>(count));
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          out[i] = fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

// Call once at startup; keeps RSS flat over long replica loops.
void configure_allocator();

// Thread count from --threads, else GMC_LAB_THREADS, else 1.
int resolve_threads(int requested);

// Certificate for the pure ln+ profile in dimension d (any d >= 1) on the
// default grid over xi T in [1e-2, 1e3].
SpectralProfile positivity_certificate(int d, double T);

// Gate used before any synthesis: scalar checks, then the spectral
// certificate, then full validation. Throws GateError on a refused kernel.
class GateError : public std::invalid_argument {
 public:
  GateError(const std::string& what, json detail) : std::invalid_argument(what), detail(std::move(detail)) {}
  json detail;
};
void gate(const io::RunConfig& cfg);

ShellLadder ladder_for(const io::RunConfig& cfg);

// --- simulate -------------------------------------------------------------
struct SimulateResult {
  std::vector<FieldSample> fields;
  std::vector<ChaosMeasure> measures;
};
SimulateResult simulate(const io::RunConfig& cfg);

// --- estimators over simulated ensembles ----------------------------------
// params: c (list), p (list), regions ("blocks" | "balls"), first_replica
ScalingReport zeta_experiment(const io::RunConfig& cfg, MomentSamples* samples_out = nullptr);

// params: c, side, positions (list of lower corners), first_replica.
// Small regions use replicas [first, first + n), reference regions the next n.
struct ScaleInvarianceRun {
  ScaleInvarianceReport report;
  std::vector<double> log_small, log_ref;
};
ScaleInvarianceRun scale_invariance_experiment(const io::RunConfig& cfg);

// params: lambda2 (list), alpha, first_replica. Region [0, 1]^d.
DegeneracyReport degeneracy_experiment(const io::RunConfig& cfg);

// params: alpha, first_replica. Region [0, 1]^d at the finest level, plus a
// second box shifted by 2 in the first axis when it fits.
struct MomentEstimate {
  double moment = 0.0, se = 0.0;
  int samples = 0;
};
MomentEstimate fractional_moment(const io::RunConfig& cfg, double alpha);

// Mean mass of [0, 1]^d at every level and mean per-shell increments.
struct MartingaleReport {
  std::vector<double> eps, mean, se, increment, increment_se;
};
MartingaleReport martingale_experiment(const io::RunConfig& cfg);

// params: l (list), centers_per_axis, first_replica. d = 3.
struct DissipationRun {
  LognormalityReport report;
  LognormalityInput input;
  std::vector<std::array<double, 3>> centers;  // value[l][replica][center] follows this order
};
DissipationRun dissipation_experiment(const io::RunConfig& cfg);

// params: t (list), first_replica. E[X(t)^2] against t.
struct MrwMoments {
  std::vector<double> t, mean_square, se;
};
MrwMoments mrw_moments(const io::RunConfig& cfg);

// params: t_end, partitions (finest count), first_replica. Per replica
// realized quadratic variation on the finest partition and its two
// successive coarsenings, against m[0, t_end].
struct QvRow {
  std::uint64_t replica;
  double mass;
  std::vector<double> qv;         // coarsest first
  std::vector<double> rel_error;  // |qv - mass| / mass
};
std::vector<QvRow> mrw_quadratic_variation(const io::RunConfig& cfg);

json to_json(const ScalingReport& r);
json to_json(const ScaleInvarianceReport& r);
json to_json(const DegeneracyReport& r);
json to_json(const LognormalityReport& r);
json to_json(const MartingaleReport& r);

}  // namespace gmc::experiments
