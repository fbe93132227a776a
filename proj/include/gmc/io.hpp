// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmc/chaos.hpp"
#include "gmc/field.hpp"
#include "gmc/kernels.hpp"
#include "gmc/spectral.hpp"

namespace gmc::io {

using nlohmann::json;

// Malformed documents raise ConfigError (a std::invalid_argument).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

json to_json(const KernelSpec& k);
json to_json(const MollifierSpec& m);
json to_json(const GridSpec& g);
KernelSpec kernel_from_json(const json& j);          // keys dimension, lambda2, scale, remainder
MollifierSpec mollifier_from_json(const json& j);    // keys kind, epsilon
GridSpec grid_from_json(const json& j, int dimension);

// Everything a run depends on. `params` carries command-specific options.
struct RunConfig {
  KernelSpec kernel;
  MollifierSpec mollifier;  // epsilon is the finest scale of the ladder
  GridSpec grid;
  std::vector<double> schedule;  // eps_0 > ... > eps_K = mollifier.epsilon
  std::uint64_t seed = 1;
  int replicas = 1;
  int threads = 1;
  std::string out = "out";
  json params = json::object();

  json to_json() const;
  std::string digest() const;  // FNV-1a of the canonical JSON without `out` and `threads`
};

// Parses without the scalar or spectral checks so that callers can order
// them (scalar validation, positivity gate, full validation).
RunConfig parse_config(const json& j);
RunConfig load_config(const std::string& path);
json read_json(const std::string& path);

// Binary grid: one JSON header line, then little-endian float64 row-major.
void write_grid(const std::string& path, const json& header, const std::vector<double>& values);
std::vector<double> read_grid(const std::string& path, json* header = nullptr);
json field_header(const FieldSample& s, const std::string& config_digest);
json measure_header(const ChaosMeasure& m, const std::string& config_digest);

// CSV files open with a "# config_digest: ..." comment line when a digest is
// given; the JSON sidecar sits at path + ".json".
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows, const std::string& digest = "");
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows, const std::string& digest = "");
std::string format_double(double v);
void write_json(const std::string& path, const json& j);

void write_spectral_profile(const std::string& path, const SpectralProfile& p, const json& extra,
                            const std::string& digest = "");

}  // namespace gmc::io
