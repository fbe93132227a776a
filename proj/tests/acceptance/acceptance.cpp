// SPDX-License-Identifier: Apache-2.0
// Acceptance harness: one PASS/FAIL line per criterion, plus a JSON report.
// Exit code 0 when every criterion passes, 3 otherwise.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gmc/estimators.hpp"
#include "gmc/experiments.hpp"
#include "gmc/io.hpp"
#include "gmc/oracles.hpp"
#include "gmc/spectral.hpp"

using nlohmann::json;
using namespace gmc;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
  json detail = json::object();
};

struct Options {
  int threads = 1;
  double replica_scale = 1.0;  // below 1 only for quick local runs
  std::uint64_t seed = 1;
};

Options opts;

int reps(int n) { return std::max(8, static_cast<int>(std::lround(n * opts.replica_scale))); }

io::RunConfig config(json j) {
  j["seed"] = opts.seed;
  j["threads"] = opts.threads;
  io::RunConfig cfg = io::parse_config(j);
  experiments::gate(cfg);
  return cfg;
}

json d1(double lambda2, int n, double length, double origin, double eps, const char* moll = "gaussian") {
  return json{{"dimension", 1},
              {"lambda2", lambda2},
              {"scale", 1.0},
              {"mollifier", {{"kind", moll}, {"epsilon", eps}}},
              {"grid", {{"n", n}, {"length", length}, {"origin", {origin}}}}};
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Structure functions in d = 1 against the analytic exponents.
Outcome ac1() {
  json j = d1(0.5, 1 << 16, 4.0, 0.0, std::ldexp(1.0, -14));
  j["replicas"] = reps(2000);
  j["params"] = {{"p", {0.5, 1.0, 2.0, 3.0}}, {"regions", "blocks"}};
  const auto cfg = config(j);
  const auto rep = experiments::zeta_experiment(cfg);
  Outcome o;
  o.pass = true;
  std::string s;
  for (const auto& f : rep.fits) {
    // +-0.1 for p <= 2, +-0.15 for p = 3
    const double tol = f.p > 2.5 ? 0.15 : 0.1;
    const bool ok = std::abs(f.zeta_hat - f.zeta_analytic) <= tol;
    o.pass = o.pass && ok;
    s += fmt("p=%.1f %.4f (%.4f+-%.2f) ", f.p, f.zeta_hat, f.zeta_analytic, tol);
  }
  o.summary = s;
  o.detail = experiments::to_json(rep);
  return o;
}

Outcome scale_invariance(int d) {
  json j;
  if (d == 1) {
    j = d1(0.5, 1 << 16, 8.0, 0.0, std::ldexp(1.0, -13));
    j["replicas"] = reps(1000);
  } else {
    j = {{"dimension", 3},
         {"lambda2", 1.0},
         {"scale", 1.0},
         {"mollifier", {{"kind", "gaussian"}, {"epsilon", 1.0 / 32}}},
         {"grid", {{"n", 128}, {"length", 4.0}, {"origin", {0.0, 0.0, 0.0}}}},
         {"replicas", reps(250)}};
  }
  j["params"] = {{"c", 0.5}, {"side", 0.5}, {"permutations", 1000}, {"alpha", 0.01}};
  const auto cfg = config(j);
  const auto run = experiments::scale_invariance_experiment(cfg);
  const auto& r = run.report;
  Outcome o;
  o.pass = r.pass();
  o.summary = fmt("d=%.0f shift %.4f vs %.4f (3SE %.4f), ", d, r.mean_shift, r.mean_target, 3 * r.mean_shift_se) +
              fmt("gain %.4f vs %.4f (3SE %.4f), ", r.variance_gain, r.variance_target, 3 * r.variance_gain_se) +
              fmt("KS %.4f < %.4f", r.ks, r.ks_critical);
  o.detail = experiments::to_json(r);
  return o;
}

Outcome ac2() {
  const Outcome a = scale_invariance(1), b = scale_invariance(3);
  return {a.pass && b.pass, a.summary + "; " + b.summary, json{{"d1", a.detail}, {"d3", b.detail}}};
}

// Decay above the threshold and a plateau below it.
Outcome ac3() {
  auto run = [](double lambda2, int replicas) {
    json j = d1(lambda2, 1 << 16, 4.0, -1.5, std::ldexp(1.0, -14));
    j["eps0"] = 0.125;
    j["replicas"] = replicas;
    j["params"] = {{"lambda2", {lambda2}}, {"alpha", 0.5}};
    return experiments::degeneracy_experiment(config(j));
  };
  const auto hi = run(3.0, reps(2000));
  const auto lo = run(0.5, reps(500));
  const auto& a = hi.rows.at(0);
  const auto& b = lo.rows.at(0);
  const double rel = std::abs(a.exponent - a.predicted) / a.predicted;
  Outcome o;
  o.pass = rel <= 0.3 && b.last_drift < 0.05;
  o.summary = fmt("lambda2=3 exponent %.4f+-%.4f vs %.4f (rel err %.2f, tol 0.30); ", a.exponent, a.exponent_se,
                  a.predicted, rel) +
              fmt("lambda2=0.5 drift %.4f (tol 0.05)", b.last_drift);
  o.detail = json{{"above", experiments::to_json(hi)}, {"below", experiments::to_json(lo)}};
  return o;
}

// Fractional moment under two mollifiers at the same epsilon.
Outcome ac4() {
  const double eps = std::ldexp(1.0, -13);  // 2h on a 2^16 grid of side 4
  auto run = [&](const char* kind, std::uint64_t first) {
    json j = d1(0.5, 1 << 16, 4.0, -0.5, eps, kind);
    j["replicas"] = reps(2000);
    j["params"] = {{"first_replica", first}};
    return experiments::fractional_moment(config(j), 0.4);
  };
  const auto g = run("gaussian", 0);
  const auto f = run("fejer", 1000000);
  const double se = std::hypot(g.se, f.se);
  const double diff = std::abs(g.moment - f.moment);
  Outcome o;
  o.pass = diff < 3.0 * se;
  o.summary = fmt("gauss %.5f fejer %.5f |diff| %.5f < 3SE %.5f", g.moment, f.moment, diff, 3 * se);
  o.detail = json{{"gaussian", {g.moment, g.se}}, {"fejer", {f.moment, f.se}}, {"eps", eps}};
  return o;
}

Outcome ac5() {
  Outcome o;
  o.pass = true;
  json certs = json::object();
  for (int d = 1; d <= 4; ++d) {
    const auto p = experiments::positivity_certificate(d, 1.0);
    const auto want = d <= 3 ? Certificate::nonnegative_on_grid : Certificate::sign_oscillating;
    o.pass = o.pass && p.certificate == want;
    certs[std::to_string(d)] = {{"certificate", to_string(p.certificate)}, {"negative_points", p.negative_points}};
    o.summary += fmt("d=%.0f ", d) + to_string(p.certificate) + " ";
  }
  const auto grid = certificate_grid(1.0);
  const auto prof = logplus_profile(1.0);
  double worst = 0.0;
  for (double xi : grid) worst = std::max(worst, std::abs(radial_fourier(prof, 3, xi).value - logplus_hat_3d(xi, 1.0)));
  o.pass = o.pass && worst <= 1e-8;
  o.summary += fmt("; d=3 closed form vs transform max |diff| %.2e (tol 1e-8)", worst);
  o.detail = json{{"certificates", certs}, {"closed_form_max_abs_diff", worst}, {"grid_points", grid.size()}};
  return o;
}

Outcome ac6() {
  std::vector<json> cfgs;
  json a = d1(0.5, 1 << 14, 4.0, -1.5, std::ldexp(1.0, -12));
  a["replicas"] = reps(1000);
  cfgs.push_back(a);
  cfgs.push_back({{"dimension", 2},
                  {"lambda2", 1.0},
                  {"scale", 1.0},
                  {"mollifier", {{"kind", "gaussian"}, {"epsilon", 1.0 / 128}}},
                  {"grid", {{"n", 512}, {"length", 4.0}, {"origin", {-1.5, -1.5}}}},
                  {"replicas", reps(300)}});
  cfgs.push_back({{"dimension", 3},
                  {"lambda2", 1.0},
                  {"scale", 1.0},
                  {"mollifier", {{"kind", "gaussian"}, {"epsilon", 1.0 / 32}}},
                  {"grid", {{"n", 128}, {"length", 4.0}, {"origin", {-1.5, -1.5, -1.5}}}},
                  {"replicas", reps(120)}});
  Outcome o;
  o.pass = true;
  json det = json::array();
  for (const auto& j : cfgs) {
    const auto rep = experiments::martingale_experiment(config(j));
    double worst_mean = 0.0, worst_inc = 0.0;  // largest |deviation| / SE
    for (std::size_t k = 0; k < rep.mean.size(); ++k) worst_mean = std::max(worst_mean, std::abs(rep.mean[k] - 1.0) / rep.se[k]);
    for (std::size_t k = 0; k < rep.increment.size(); ++k)
      worst_inc = std::max(worst_inc, std::abs(rep.increment[k]) / rep.increment_se[k]);
    o.pass = o.pass && worst_mean <= 3.0 && worst_inc <= 3.0;
    o.summary += fmt("d=%.0f max |mean-1|/SE %.2f, max |inc|/SE %.2f; ", j["dimension"].get<int>(), worst_mean, worst_inc);
    det.push_back(experiments::to_json(rep));
  }
  o.summary += "(tol 3)";
  o.detail = det;
  return o;
}

// At N = 2^7 the smallest ball is only a few cells wide, so the torus is as
// small as one ball's wrap-around margin allows (L = 2R + 2 l_max = 3R) and
// epsilon sits at the grid step.
Outcome ac7() {
  json j{{"dimension", 3},
         {"lambda2", 1.0},
         {"scale", 1.0},
         {"mollifier", {{"kind", "gaussian"}, {"epsilon", 3.0 / 128}}},
         {"eps0", 3.0 / 16},
         {"grid", {{"n", 128}, {"length", 3.0}, {"origin", {-1.0, -1.0, -1.0}}}},
         {"replicas", reps(64)},
         {"params", {{"l", {0.5, 0.25, 0.125, 0.0625}}, {"centers_per_axis", 4}, {"mean_dissipation", 1.0}}}};
  const auto run = experiments::dissipation_experiment(config(j));
  const auto& r = run.report;
  double worst = 0.0;
  for (const auto& row : r.rows) worst = std::max(worst, std::abs(row.mean - 1.0) / row.mean_se);
  Outcome o;
  o.pass = std::abs(r.slope - 1.0) <= 0.15 && worst <= 3.0;
  o.summary = fmt("slope %.4f+-%.4f (1.0+-0.15), A %.3f, max |E eps_l - 1|/SE %.2f (tol 3)", r.slope, r.slope_se,
                  r.intercept, worst);
  o.detail = experiments::to_json(r);
  return o;
}

Outcome ac8() {
  json j = d1(0.5, 1 << 14, 4.0, -0.5, std::ldexp(1.0, -12));
  j["replicas"] = reps(2000);
  j["params"] = {{"t", {0.25, 0.5, 1.0}}};
  const auto mom = experiments::mrw_moments(config(j));
  Outcome o;
  o.pass = true;
  for (std::size_t k = 0; k < mom.t.size(); ++k) {
    const bool ok = std::abs(mom.mean_square[k] - mom.t[k]) <= 3.0 * mom.se[k];
    o.pass = o.pass && ok;
    o.summary += fmt("E[X(%.2f)^2] %.4f+-%.4f; ", mom.t[k], mom.mean_square[k], mom.se[k]);
  }
  json q = d1(0.5, 1 << 14, 4.0, -0.5, std::ldexp(1.0, -12));
  q["replicas"] = std::max(4, reps(16));
  q["params"] = {{"t_end", 1.0}, {"partitions", 1 << 23}, {"first_replica", 0}};
  const auto qv = experiments::mrw_quadratic_variation(config(q));
  double worst = 0.0;
  json rows = json::array();
  for (const auto& r : qv) {
    worst = std::max(worst, r.rel_error.back());
    rows.push_back({{"replica", r.replica}, {"mass", r.mass}, {"qv", r.qv}, {"rel_error", r.rel_error}});
  }
  o.pass = o.pass && worst <= 0.02;
  o.summary += fmt("QV on 2^23 steps: worst relative error %.4f over %.0f replicas (tol 0.02)", worst,
                   static_cast<double>(qv.size()));
  o.detail = json{{"moments", {{"t", mom.t}, {"mean_square", mom.mean_square}, {"se", mom.se}}}, {"qv", rows}};
  return o;
}

Outcome ac9() {
  oracles::SuiteOptions opt;
  opt.seed = opts.seed;
  const auto rep = oracles::run_suite(opt);
  Outcome o;
  o.pass = rep.failed == 0 && rep.inconclusive == 0;
  o.summary = fmt("%.0f passed, %.0f failed, %.0f inconclusive", rep.passed, rep.failed, rep.inconclusive);
  for (const auto& v : rep.verdicts)
    if (v.status != oracles::Status::pass) o.summary += "; " + v.name + " " + oracles::to_string(v.status);
  o.detail = rep.to_json();
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  experiments::configure_allocator();
  CLI::App app{"gmc acceptance harness"};
  std::string out = "acceptance";
  std::vector<std::string> only;
  app.add_option("--out", out, "Directory for the JSON report");
  app.add_option("--only", only, "Subset of criteria, e.g. AC1 AC5")->delimiter(',');
  app.add_option("--threads", opts.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--replica-scale", opts.replica_scale, "Scale replica counts (quick local runs only)")
      ->check(CLI::Range(0.001, 1.0));
  app.add_option("--seed", opts.seed, "Master seed");
  CLI11_PARSE(app, argc, argv);
  if (opts.threads == 1) opts.threads = experiments::resolve_threads(0);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 structure functions", ac1},   {"AC2 scale invariance", ac2},  {"AC3 degeneracy dichotomy", ac3},
      {"AC4 mollifier independence", ac4}, {"AC5 positive definiteness", ac5}, {"AC6 martingale normalization", ac6},
      {"AC7 dissipation statistics", ac7}, {"AC8 multifractal random walk", ac8}, {"AC9 comparison oracles", ac9}};
  const std::set<std::string> selected(only.begin(), only.end());

  json report = json::object();
  int failed = 0, ran = 0;
  for (const auto& [name, fn] : criteria) {
    const std::string id = name.substr(0, 3);
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.summary.c_str(), secs);
    std::fflush(stdout);
    report[id] = {{"name", name}, {"pass", o.pass}, {"summary", o.summary}, {"seconds", secs}, {"detail", o.detail}};
    ++ran;
    if (!o.pass) ++failed;
  }
  report["seed"] = opts.seed;
  report["replica_scale"] = opts.replica_scale;
  io::write_json((std::filesystem::path(out) / "acceptance.json").string(), report);
  std::printf("%d of %d criteria passed\n", ran - failed, ran);
  return failed ? 3 : 0;
}
