// SPDX-License-Identifier: Apache-2.0
#include "gmc/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gmc/digest.hpp"

namespace gmc::io {

namespace {

template <class T>
T get(const json& j, const char* key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: key '") + key + "' has the wrong type: " + e.what());
  }
}

template <class T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("config: missing key '") + key + "'");
  return get<T>(j, key, T{});
}

void ensure_parent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

}  // namespace

json to_json(const KernelSpec& k) {
  json rem{{"kind", to_string(k.remainder.kind)}};
  if (k.remainder.kind == RemainderKind::constant) rem["constant"] = k.remainder.constant;
  if (k.remainder.kind == RemainderKind::table) {
    json t = json::array();
    for (std::size_t i = 0; i < k.remainder.r.size(); ++i) t.push_back({k.remainder.r[i], k.remainder.g[i]});
    rem["table"] = t;
  }
  return json{{"dimension", k.dimension}, {"lambda2", k.lambda2}, {"scale", k.scale}, {"remainder", rem}};
}

json to_json(const MollifierSpec& m) { return json{{"kind", to_string(m.kind)}, {"epsilon", m.epsilon}}; }

json to_json(const GridSpec& g) {
  json o = json::array();
  for (int a = 0; a < g.dimension; ++a) o.push_back(g.origin[a]);
  return json{{"dimension", g.dimension}, {"n", g.n}, {"length", g.length}, {"origin", o}};
}

KernelSpec kernel_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: kernel must be an object");
  KernelSpec k;
  k.dimension = require<int>(j, "dimension");
  k.lambda2 = require<double>(j, "lambda2");
  k.scale = get<double>(j, "scale", 1.0);
  if (j.contains("remainder")) {
    const json& r = j.at("remainder");
    if (!r.is_object()) throw ConfigError("config: remainder must be an object");
    try {
      k.remainder.kind = remainder_kind_from_string(get<std::string>(r, "kind", "zero"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    k.remainder.constant = get<double>(r, "constant", 0.0);
    if (r.contains("table")) {
      const json& t = r.at("table");
      if (!t.is_array()) throw ConfigError("config: remainder table must be an array of [r, g] pairs");
      for (const auto& row : t) {
        if (!row.is_array() || row.size() != 2) throw ConfigError("config: remainder table rows must be [r, g]");
        k.remainder.r.push_back(row[0].get<double>());
        k.remainder.g.push_back(row[1].get<double>());
      }
    }
  }
  return k;
}

MollifierSpec mollifier_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: mollifier must be an object");
  MollifierSpec m;
  try {
    m.kind = mollifier_kind_from_string(get<std::string>(j, "kind", "gaussian"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  m.epsilon = require<double>(j, "epsilon");
  return m;
}

GridSpec grid_from_json(const json& j, int dimension) {
  if (!j.is_object()) throw ConfigError("config: grid must be an object");
  GridSpec g;
  g.dimension = dimension;
  g.n = require<int>(j, "n");
  g.length = require<double>(j, "length");
  if (j.contains("origin")) {
    const auto o = j.at("origin").get<std::vector<double>>();
    if (static_cast<int>(o.size()) != dimension) throw ConfigError("config: grid origin needs one entry per axis");
    for (int a = 0; a < dimension && a < 3; ++a) g.origin[a] = o[a];
  }
  return g;
}

json RunConfig::to_json() const {
  json j = io::to_json(kernel);
  j["mollifier"] = io::to_json(mollifier);
  j["grid"] = io::to_json(grid);
  j["schedule"] = schedule;
  j["seed"] = seed;
  j["replicas"] = replicas;
  j["threads"] = threads;
  j["out"] = out;
  j["params"] = params;
  return j;
}

std::string RunConfig::digest() const {
  json j = to_json();
  j.erase("out");
  j.erase("threads");
  return fnv1a_hex(j.dump());
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  RunConfig c;
  c.kernel = kernel_from_json(j);
  if (!j.contains("mollifier")) throw ConfigError("config: missing key 'mollifier'");
  c.mollifier = mollifier_from_json(j.at("mollifier"));
  if (!j.contains("grid")) throw ConfigError("config: missing key 'grid'");
  c.grid = grid_from_json(j.at("grid"), c.kernel.dimension);
  if (j.contains("schedule")) {
    c.schedule = j.at("schedule").get<std::vector<double>>();
  } else {
    // Geometric ladder from eps0 (default R / 8) halving down to epsilon.
    const double eps0 = get<double>(j, "eps0", c.kernel.scale / 8.0);
    const double ratio = eps0 / c.mollifier.epsilon;
    const double k = std::round(std::log2(ratio));
    if (!(ratio >= 1.0) || std::abs(std::log2(ratio) - k) > 1e-9)
      throw ConfigError("config: eps0 / mollifier.epsilon must be a power of two (or give an explicit schedule)");
    for (int i = 0; i <= static_cast<int>(k); ++i) c.schedule.push_back(eps0 * std::ldexp(1.0, -i));
  }
  if (c.schedule.empty() || std::abs(c.schedule.back() - c.mollifier.epsilon) > 1e-12 * c.mollifier.epsilon)
    throw ConfigError("config: the schedule must end at mollifier.epsilon");
  c.seed = get<std::uint64_t>(j, "seed", 1);
  c.replicas = get<int>(j, "replicas", 1);
  c.threads = get<int>(j, "threads", 1);
  c.out = get<std::string>(j, "out", "out");
  if (j.contains("params")) c.params = j.at("params");
  if (c.replicas < 1) throw ConfigError("config: replicas must be >= 1");
  return c;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

RunConfig load_config(const std::string& path) { return parse_config(read_json(path)); }

void write_grid(const std::string& path, const json& header, const std::vector<double>& values) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  json h = header;
  h["format"] = "float64-le row-major";
  h["count"] = values.size();
  out << h.dump() << '\n';
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  } else {
    for (double v : values) {
      auto bits = std::bit_cast<std::uint64_t>(v);
      char b[8];
      for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
      out.write(b, 8);
    }
  }
  if (!out) throw std::runtime_error("short write to '" + path + "'");
}

std::vector<double> read_grid(const std::string& path, json* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  json h = json::parse(line);
  const std::size_t count = h.at("count").get<std::size_t>();
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(b[k]) << (8 * k);
    v[i] = std::bit_cast<double>(bits);
  }
  if (!in) throw ConfigError("'" + path + "' is truncated");
  if (header) *header = h;
  return v;
}

json field_header(const FieldSample& s, const std::string& config_digest) {
  return json{{"kind", "field"},         {"grid", to_json(s.grid)},   {"level", s.level},
              {"eps", s.eps},            {"seed", s.seed},            {"replica", s.replica},
              {"variance", s.variance},  {"ladder_digest", s.ladder_digest}, {"config_digest", config_digest}};
}

json measure_header(const ChaosMeasure& m, const std::string& config_digest) {
  return json{{"kind", "measure"}, {"grid", to_json(m.grid)},           {"level", m.level},
              {"eps", m.eps},      {"seed", m.seed},                    {"replica", m.replica},
              {"ladder_digest", m.ladder_digest}, {"config_digest", config_digest}};
}

std::string format_double(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows, const std::string& digest) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  if (!digest.empty()) out << "# config_digest: " << digest << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows, const std::string& digest) {
  std::vector<std::vector<std::string>> text;
  text.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<std::string> t;
    for (double v : row) t.push_back(format_double(v));
    text.push_back(std::move(t));
  }
  write_csv(path, columns, text, digest);
}

void write_json(const std::string& path, const json& j) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

void write_spectral_profile(const std::string& path, const SpectralProfile& p, const json& extra,
                            const std::string& digest) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < p.xi.size(); ++i) rows.push_back({p.xi[i], p.fhat[i], p.err[i]});
  write_csv(path, {"xi", "fhat", "err"}, rows, digest);
  json side = extra;
  if (!digest.empty()) side["config_digest"] = digest;
  side["dimension"] = p.dimension;
  side["certificate"] = to_string(p.certificate);
  side["negative_points"] = p.negative_points;
  side["converged_points"] = p.converged_points;
  side["points"] = p.xi.size();
  write_json(path + ".json", side);
}

}  // namespace gmc::io
