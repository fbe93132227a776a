// SPDX-License-Identifier: Apache-2.0
// gmc_lab: simulate chaos measures, estimate their laws, run the oracle suite.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gmc/digest.hpp"
#include "gmc/experiments.hpp"
#include "gmc/io.hpp"
#include "gmc/oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gmc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitFailure = 3;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicas;
  std::optional<std::string> out;
  int threads = 0;
};

int fail(const std::string& kind, const std::string& message, const json& detail = json::object()) {
  json e{{"error", kind}, {"message", message}};
  if (!detail.empty()) e["detail"] = detail;
  std::cerr << e.dump() << '\n';
  return kExitValidation;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return fnv1a_hex(s.str());
}

// Load, apply flag overrides, then gate. A manifest written by `simulate`
// is accepted in place of a config and replays that run.
io::RunConfig prepare(const Flags& f) {
  if (f.config.empty()) throw io::ConfigError("--config is required");
  json j = io::read_json(f.config);
  if (j.is_object() && j.contains("manifest_version")) j = j.at("config");
  io::RunConfig cfg = io::parse_config(j);
  if (f.seed) cfg.seed = *f.seed;
  if (f.replicas) {
    if (*f.replicas < 1) throw io::ConfigError("--replicas must be >= 1");
    cfg.replicas = *f.replicas;
  }
  if (f.out) cfg.out = *f.out;
  if (f.threads > 0 || std::getenv("GMC_LAB_THREADS"))
    cfg.threads = experiments::resolve_threads(f.threads);
  cfg.threads = std::max(1, cfg.threads);
  experiments::gate(cfg);
  return cfg;
}

json run_info(const io::RunConfig& cfg) {
  return json{{"config_digest", cfg.digest()},
              {"seed", cfg.seed},
              {"replicas", cfg.replicas},
              {"first_replica", cfg.params.value("first_replica", std::uint64_t{0})},
              {"grid", io::to_json(cfg.grid)},
              {"mollifier", io::to_json(cfg.mollifier)},
              {"schedule", cfg.schedule},
              {"ladder_digest", experiments::ladder_for(cfg).digest()}};
}

int cmd_simulate(const Flags& f) {
  const io::RunConfig cfg = prepare(f);
  const std::string digest = cfg.digest();
  const auto res = experiments::simulate(cfg);
  json files = json::array();
  for (std::size_t i = 0; i < res.fields.size(); ++i) {
    const auto& fs_ = res.fields[i];
    const auto& ms = res.measures[i];
    const std::string tag = "r" + std::to_string(fs_.replica);
    const std::string fpath = (fs::path(cfg.out) / ("field_" + tag + ".bin")).string();
    const std::string mpath = (fs::path(cfg.out) / ("measure_" + tag + ".bin")).string();
    io::write_grid(fpath, io::field_header(fs_, digest), fs_.values);
    io::write_grid(mpath, io::measure_header(ms, digest), ms.mass);
    files.push_back({{"kind", "field"}, {"replica", fs_.replica}, {"path", fs::path(fpath).filename()},
                     {"fnv1a", file_digest(fpath)}});
    files.push_back({{"kind", "measure"}, {"replica", ms.replica}, {"path", fs::path(mpath).filename()},
                     {"fnv1a", file_digest(mpath)}});
  }
  json manifest = run_info(cfg);
  manifest["manifest_version"] = 1;
  manifest["config"] = cfg.to_json();
  manifest["files"] = files;
  io::write_json((fs::path(cfg.out) / "manifest.json").string(), manifest);
  std::printf("simulate: %d replica(s) at eps=%.6g written to %s (config %s)\n", cfg.replicas,
              cfg.mollifier.epsilon, cfg.out.c_str(), digest.c_str());
  return kExitOk;
}

std::string out_path(const io::RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out) / name).string();
}

int estimate_zeta(const io::RunConfig& cfg) {
  const auto rep = experiments::zeta_experiment(cfg);
  const std::string digest = cfg.digest();
  std::vector<std::vector<double>> rows;
  for (const auto& pt : rep.points) {
    double zhat = 0.0, z = 0.0;
    for (const auto& fit : rep.fits)
      if (fit.p == pt.p) zhat = fit.zeta_hat, z = fit.zeta_analytic;
    rows.push_back({pt.p, pt.c, pt.moment, pt.se, pt.heavy_tail ? 1.0 : 0.0, zhat, z});
  }
  const std::string path = out_path(cfg, "zeta.csv");
  io::write_csv(path, {"p", "c", "moment", "se", "heavy_tail", "zeta_hat", "zeta"}, rows, digest);
  json side = run_info(cfg);
  side["report"] = experiments::to_json(rep);
  io::write_json(path + ".json", side);
  std::ostringstream line;
  line << "zeta:";
  for (const auto& fit : rep.fits)
    line << " p=" << fit.p << " zeta_hat=" << fit.zeta_hat << "+-" << fit.se << " (zeta=" << fit.zeta_analytic << ")";
  std::cout << line.str() << '\n';
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
  return kExitOk;
}

int estimate_scale_invariance(const io::RunConfig& cfg) {
  const auto run = experiments::scale_invariance_experiment(cfg);
  std::vector<std::vector<double>> rows;
  for (double v : run.log_small) rows.push_back({0.0, v});
  for (double v : run.log_ref) rows.push_back({1.0, v});
  const std::string path = out_path(cfg, "scale_invariance.csv");
  io::write_csv(path, {"reference", "log_mass"}, rows, cfg.digest());
  json side = run_info(cfg);
  side["report"] = experiments::to_json(run.report);
  io::write_json(path + ".json", side);
  const auto& r = run.report;
  std::printf("scale-invariance: mean shift %.5g+-%.2g (target %.5g), variance gain %.5g+-%.2g (target %.5g), "
              "KS %.4g (critical %.4g)\n",
              r.mean_shift, r.mean_shift_se, r.mean_target, r.variance_gain, r.variance_gain_se, r.variance_target,
              r.ks, r.ks_critical);
  return kExitOk;
}

int estimate_degeneracy(const io::RunConfig& cfg) {
  const auto rep = experiments::degeneracy_experiment(cfg);
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : rep.rows)
    rows.push_back({io::format_double(r.lambda2), io::format_double(r.moment.back()),
                    io::format_double(r.moment_se.back()),
                    io::format_double(r.exponent), io::format_double(r.exponent_se), io::format_double(r.predicted),
                    io::format_double(r.last_drift), r.verdict});
  const std::string path = out_path(cfg, "degeneracy.csv");
  io::write_csv(path,
                {"lambda2", "moment", "moment_se", "exponent", "exponent_se", "predicted", "last_drift", "verdict"},
                rows, cfg.digest());
  std::vector<std::vector<double>> levels;
  for (const auto& r : rep.rows)
    for (std::size_t k = 0; k < r.moment.size(); ++k)
      levels.push_back({r.lambda2, static_cast<double>(k), cfg.schedule[k], r.moment[k], r.moment_se[k]});
  io::write_csv(out_path(cfg, "degeneracy_levels.csv"), {"lambda2", "level", "eps", "moment", "se"}, levels,
                cfg.digest());
  json side = run_info(cfg);
  side["report"] = experiments::to_json(rep);
  io::write_json(path + ".json", side);
  std::cout << "degeneracy:";
  for (const auto& r : rep.rows) std::cout << " lambda2=" << r.lambda2 << " " << r.verdict;
  std::cout << '\n';
  return kExitOk;
}

int estimate_dissipation(const io::RunConfig& cfg) {
  const auto run = experiments::dissipation_experiment(cfg);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < run.input.l.size(); ++k)
    for (const auto& per_replica : run.input.value[k])
      for (std::size_t c = 0; c < per_replica.size(); ++c)
        rows.push_back({run.centers[c][0], run.centers[c][1], run.centers[c][2], run.input.l[k], per_replica[c]});
  const std::string path = out_path(cfg, "dissipation.csv");
  io::write_csv(path, {"x", "y", "z", "l", "eps_l"}, rows, cfg.digest());
  json side = run_info(cfg);
  side["report"] = experiments::to_json(run.report);
  io::write_json(path + ".json", side);
  std::printf("dissipation: slope of Var(ln eps_l) vs ln(R/l) %.4g+-%.2g, constant %.4g\n", run.report.slope,
              run.report.slope_se, run.report.intercept);
  return kExitOk;
}

int estimate_mrw(const io::RunConfig& cfg) {
  const std::string digest = cfg.digest();
  const auto mom = experiments::mrw_moments(cfg);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < mom.t.size(); ++k) rows.push_back({mom.t[k], mom.mean_square[k], mom.se[k]});
  const std::string path = out_path(cfg, "mrw.csv");
  io::write_csv(path, {"t", "mean_square", "se"}, rows, digest);

  // One plot-ready path for the first replica.
  const int points = cfg.params.value("path_points", 1024);
  const double t_end = cfg.params.value("t_end", 1.0);
  {
    FieldSynthesizer synth(experiments::ladder_for(cfg), cfg.grid);
    const std::uint64_t first = cfg.params.value("first_replica", std::uint64_t{0});
    const ChaosMeasure m = exponentiate(synth.synthesize(cfg.seed, first, synth.levels() - 1));
    Stream bm(cfg.seed, first, 0, StreamTag::brownian);
    std::vector<double> t(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) t[i] = t_end * (i + 1) / points;
    const auto x = mrw_path(m, 0.0, t, bm);
    std::vector<std::vector<double>> prow{{0.0, 0.0}};
    for (int i = 0; i < points; ++i) prow.push_back({t[i], x[i]});
    io::write_csv(out_path(cfg, "mrw_path.csv"), {"t", "X"}, prow, digest);
  }

  json side = run_info(cfg);
  side["moments"] = {{"t", mom.t}, {"mean_square", mom.mean_square}, {"se", mom.se}};
  const int qv_replicas = cfg.params.value("qv_replicas", 0);
  if (qv_replicas > 0) {
    io::RunConfig qcfg = cfg;
    qcfg.replicas = qv_replicas;
    const auto qv = experiments::mrw_quadratic_variation(qcfg);
    std::vector<std::vector<double>> qrows;
    json qj = json::array();
    for (const auto& q : qv) {
      qrows.push_back({static_cast<double>(q.replica), q.mass, q.qv[0], q.qv[1], q.qv[2], q.rel_error[2]});
      qj.push_back({{"replica", q.replica}, {"mass", q.mass}, {"qv", q.qv}, {"rel_error", q.rel_error}});
    }
    io::write_csv(out_path(cfg, "mrw_qv.csv"), {"replica", "mass", "qv_coarse", "qv_mid", "qv_fine", "rel_error"},
                  qrows, digest);
    side["quadratic_variation"] = qj;
  }
  io::write_json(path + ".json", side);
  std::cout << "mrw:";
  for (std::size_t k = 0; k < mom.t.size(); ++k)
    std::cout << " E[X(" << mom.t[k] << ")^2]=" << mom.mean_square[k] << "+-" << mom.se[k];
  std::cout << '\n';
  return kExitOk;
}

int cmd_estimate(const Flags& f, const std::string& kind) {
  const io::RunConfig cfg = prepare(f);
  if (kind == "zeta") return estimate_zeta(cfg);
  if (kind == "scale-invariance") return estimate_scale_invariance(cfg);
  if (kind == "degeneracy") return estimate_degeneracy(cfg);
  if (kind == "dissipation") return estimate_dissipation(cfg);
  if (kind == "mrw") return estimate_mrw(cfg);
  throw io::ConfigError("unknown report kind '" + kind + "'");
}

oracles::GaussianVectorSpec vector_from_json(const json& j) {
  oracles::GaussianVectorSpec v;
  v.n = j.at("n").get<int>();
  v.cov = j.at("cov").get<std::vector<double>>();
  v.weights = j.contains("weights") ? j.at("weights").get<std::vector<double>>()
                                    : std::vector<double>(static_cast<std::size_t>(v.n), 1.0);
  v.validate();
  return v;
}

// Extra comparison instances from a JSON file:
// {"instances": [{"x": {n, cov, weights}, "y": {...}}, ...]}.
std::vector<oracles::Verdict> custom_instances(const std::string& path, std::uint64_t seed, std::uint64_t budget) {
  const json doc = io::read_json(path);
  if (!doc.contains("instances") || !doc.at("instances").is_array())
    throw io::ConfigError("oracle input needs an 'instances' array");
  std::vector<oracles::Verdict> out;
  std::uint64_t k = 0;
  for (const auto& inst : doc.at("instances")) {
    oracles::GaussianVectorSpec x, y;
    try {
      x = vector_from_json(inst.at("x"));
      y = vector_from_json(inst.at("y"));
    } catch (const json::exception& e) {
      throw io::ConfigError(std::string("oracle instance is malformed: ") + e.what());
    }
    if (x.n != y.n) throw io::ConfigError("oracle instance vectors differ in size");
    oracles::Phi call{oracles::TestFunction::call, 1.0};
    auto v = oracles::convex_comparison_check(x, y, call, 80, 120);
    v.name = "custom/" + std::to_string(k) + "/" + v.name;
    out.push_back(v);
    auto s = oracles::sup_comparison_check(y, x, oracles::SupFunction::identity, budget, seed, 1000 + k);
    s.name = "custom/" + std::to_string(k) + "/" + s.name;
    out.push_back(s);
    ++k;
  }
  return out;
}

int cmd_oracles(const Flags& f, std::uint64_t budget, int instances) {
  oracles::SuiteOptions opt;
  opt.seed = f.seed.value_or(1);
  opt.mc_samples = budget;
  opt.instances = instances;
  std::vector<oracles::Verdict> extra;
  if (!f.config.empty()) extra = custom_instances(f.config, opt.seed, budget);
  oracles::SuiteReport rep = oracles::run_suite(opt);
  for (auto& v : extra) {
    if (v.status == oracles::Status::pass) ++rep.passed;
    if (v.status == oracles::Status::fail) ++rep.failed;
    if (v.status == oracles::Status::inconclusive) ++rep.inconclusive;
    rep.verdicts.push_back(std::move(v));
  }
  json j = rep.to_json();
  j["seed"] = opt.seed;
  j["mc_samples"] = budget;
  const std::string out = f.out.value_or("out");
  io::write_json((fs::path(out) / "oracles.json").string(), j);
  for (const auto& v : rep.verdicts)
    if (v.status == oracles::Status::inconclusive) std::cerr << "warning: inconclusive " << v.name << '\n';
  for (const auto& v : rep.verdicts)
    if (v.status == oracles::Status::fail)
      std::cerr << "FAIL " << v.name << " margin " << v.margin << " budget " << v.budget << '\n';
  std::printf("oracles: %d passed, %d failed, %d inconclusive\n", rep.passed, rep.failed, rep.inconclusive);
  return rep.failed > 0 ? kExitFailure : kExitOk;
}

int cmd_spectral(int d, double T, const std::string& out) {
  const SpectralProfile p = experiments::positivity_certificate(d, T);
  const std::string path = (fs::path(out) / ("spectral_d" + std::to_string(d) + ".csv")).string();
  io::write_spectral_profile(path, p, json{{"T", T}});
  std::printf("spectral: d=%d %s (%zu negative of %zu points)\n", d, to_string(p.certificate).c_str(),
              p.negative_points, p.xi.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  experiments::configure_allocator();
  CLI::App app{"Gaussian multiplicative chaos laboratory"};
  app.require_subcommand(1);
  Flags f;
  std::uint64_t seed = 0;
  int replicas = 0;
  std::string out;
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");
  auto* rep_opt = app.add_option("--replicas", replicas, "Replica count (overrides the config)");
  auto* out_opt = app.add_option("--out", out, "Output directory (overrides the config)");
  app.add_option("--config", f.config, "Run configuration (JSON), or a manifest to replay");
  app.add_option("--threads", f.threads, "Worker threads; falls back to GMC_LAB_THREADS")->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("simulate", "Write field and measure grids plus a manifest");
  sim->fallthrough();
  auto* est = app.add_subcommand("estimate", "Run an estimator and write CSV + JSON reports");
  std::string kind;
  est->add_option("kind", kind, "zeta | scale-invariance | degeneracy | dissipation | mrw")
      ->required()
      ->check(CLI::IsMember({"zeta", "scale-invariance", "degeneracy", "dissipation", "mrw"}));
  est->fallthrough();
  auto* orc = app.add_subcommand("oracles", "Run the Gaussian comparison oracle suite");
  std::uint64_t budget = 1000000;
  int instances = 20;
  orc->add_option("--budget", budget, "Monte Carlo samples per randomized check (0 makes them inconclusive)");
  orc->add_option("--instances", instances, "Randomized instances per comparison check")
      ->check(CLI::PositiveNumber);
  orc->fallthrough();
  auto* spec = app.add_subcommand("spectral", "Certify the sign of the log+ kernel spectrum");
  int dim = 3;
  double T = 1.0;
  spec->add_option("--dimension", dim, "Dimension d")->check(CLI::PositiveNumber);
  spec->add_option("--scale", T, "Integral scale T")->check(CLI::PositiveNumber);
  spec->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }
  if (*seed_opt) f.seed = seed;
  if (*rep_opt) f.replicas = replicas;
  if (*out_opt) f.out = out;

  try {
    if (*sim) return cmd_simulate(f);
    if (*est) return cmd_estimate(f, kind);
    if (*orc) return cmd_oracles(f, budget, instances);
    if (*spec) return cmd_spectral(dim, T, f.out.value_or("out"));
  } catch (const experiments::GateError& e) {
    return fail("gate", e.what(), e.detail);
  } catch (const io::ConfigError& e) {
    return fail("config", e.what());
  } catch (const std::invalid_argument& e) {
    return fail("validation", e.what());
  } catch (const std::domain_error& e) {
    return fail("validation", e.what());
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "runtime"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  return kExitOk;
}
