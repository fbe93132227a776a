// SPDX-License-Identifier: Apache-2.0
#include "gmc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace gmc::experiments {

namespace {

template <class T>
T param(const io::RunConfig& cfg, const char* key, const T& fallback) {
  if (!cfg.params.contains(key)) return fallback;
  try {
    return cfg.params.at(key).get<T>();
  } catch (const json::exception& e) {
    throw io::ConfigError(std::string("config: params.") + key + " has the wrong type: " + e.what());
  }
}

std::uint64_t first_replica(const io::RunConfig& cfg) { return param<std::uint64_t>(cfg, "first_replica", 0); }

Box unit_box(double shift0 = 0.0) {
  Box b;  // [0, 1]^3; axes beyond the grid dimension are ignored
  b.lo[0] += shift0;
  b.hi[0] += shift0;
  return b;
}

bool box_fits(const GridSpec& g, const Box& b, double margin) {
  for (int a = 0; a < g.dimension; ++a)
    if (b.lo[a] < g.origin[a] + margin || b.hi[a] > g.origin[a] + g.length - margin) return false;
  return true;
}

// Lower corners of a lattice with spacing 2 starting half a unit inside the
// grid, keeping boxes of the given side clear of the edges.
std::vector<std::array<double, 3>> default_positions(const GridSpec& g, double side) {
  std::vector<double> axis;
  for (double x = g.origin[0] + 0.5; x + side <= g.origin[0] + g.length - 0.5 + 1e-12; x += 2.0) axis.push_back(x);
  std::vector<std::array<double, 3>> out;
  const int d = g.dimension;
  const std::size_t n = axis.size();
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= n;
  for (std::size_t i = 0; i < total; ++i) {
    std::array<double, 3> p{0.0, 0.0, 0.0};
    std::size_t code = i;
    for (int a = 0; a < d; ++a) {
      p[a] = axis[code % n] - g.origin[0] + g.origin[a];
      code /= n;
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace

void configure_allocator() {
#if defined(__GLIBC__)
  // Grid buffers are large and short-lived. Keeping them on mmap stops glibc
  // from raising its threshold and fragmenting the heap across replicas.
  mallopt(M_MMAP_THRESHOLD, 1 << 20);
#endif
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GMC_LAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    throw io::ConfigError(std::string("GMC_LAB_THREADS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

SpectralProfile positivity_certificate(int d, double T) {
  return check_positive_definite(logplus_profile(T), d, certificate_grid(T), T);
}

void gate(const io::RunConfig& cfg) {
  const KernelSpec& k = cfg.kernel;
  if (k.dimension < 1) throw io::ConfigError("config: dimension must be >= 1");
  if (!(k.lambda2 > 0.0)) throw io::ConfigError("config: lambda2 must be positive");
  if (std::abs(k.lambda2 - 2.0 * k.dimension) <= 1e-12 * k.dimension)
    throw io::ConfigError("config: lambda2 = 2d is excluded");
  if (!(k.scale > 0.0)) throw io::ConfigError("config: scale must be positive");
  const SpectralProfile cert = positivity_certificate(k.dimension, k.scale);
  if (cert.certificate != Certificate::nonnegative_on_grid) {
    std::ostringstream msg;
    msg << "positivity gate: the ln+ kernel is not positive definite in d = " << k.dimension << " ("
        << to_string(cert.certificate) << ", " << cert.negative_points << " negative grid points)";
    throw GateError(msg.str(), json{{"dimension", k.dimension},
                                    {"certificate", to_string(cert.certificate)},
                                    {"negative_points", cert.negative_points},
                                    {"grid_points", cert.xi.size()}});
  }
  k.validate();
  cfg.mollifier.validate();
  cfg.grid.validate();
  if (cfg.grid.dimension != k.dimension) throw io::ConfigError("config: grid and kernel dimensions differ");
}

ShellLadder ladder_for(const io::RunConfig& cfg) { return build_ladder(cfg.kernel, cfg.mollifier.kind, cfg.schedule); }

SimulateResult simulate(const io::RunConfig& cfg) {
  const ShellLadder ladder = ladder_for(cfg);
  FieldSynthesizer synth(ladder, cfg.grid);
  const std::uint64_t first = first_replica(cfg);
  const int level = synth.levels() - 1;
  SimulateResult res;
  res.fields = map_indexed<FieldSample>(cfg.replicas, cfg.threads,
                                        [&](int i) { return synth.synthesize(cfg.seed, first + i, level); });
  for (const auto& f : res.fields) res.measures.push_back(exponentiate(f));
  return res;
}

ScalingReport zeta_experiment(const io::RunConfig& cfg, MomentSamples* samples_out) {
  const double R = cfg.kernel.scale;
  std::vector<double> c = param<std::vector<double>>(cfg, "c", {});
  if (c.empty())
    for (int k = 7; k >= 3; --k) c.push_back(R * std::ldexp(1.0, -k));
  const std::vector<double> p = param<std::vector<double>>(cfg, "p", {0.5, 1.0, 2.0, 3.0});
  const std::string regions = param<std::string>(cfg, "regions", "blocks");
  if (regions != "blocks" && regions != "balls") throw io::ConfigError("config: params.regions must be blocks or balls");
  const GridSpec& g = cfg.grid;
  const double h = g.step();
  require_periodization_margin(g, cfg.kernel, *std::max_element(c.begin(), c.end()));
  std::vector<int> cells;
  for (double ci : c) {
    const double b = ci / h;
    if (regions == "blocks" && (std::abs(b - std::round(b)) > 1e-9 * b || g.n % static_cast<int>(std::round(b)) != 0))
      throw io::ConfigError("config: every scale must be a whole number of cells dividing the grid side");
    cells.push_back(static_cast<int>(std::round(b)));
  }
  // Validate the estimator preconditions before spending time on synthesis.
  {
    MomentSamples probe;
    probe.c = c;
    probe.balls = regions == "balls";
    probe.mass.assign(c.size(), std::vector<std::vector<double>>(2, std::vector<double>{1.0, 2.0}));
    ScalingContext ctx{cfg.kernel.dimension, cfg.kernel.lambda2, R, h, 20};
    moment_scaling(probe, p, ctx);
  }
  const ShellLadder ladder = ladder_for(cfg);
  FieldSynthesizer synth(ladder, g);
  const std::uint64_t first = first_replica(cfg);
  const int level = synth.levels() - 1;
  using PerReplica = std::vector<std::vector<double>>;
  const auto per = map_indexed<PerReplica>(cfg.replicas, cfg.threads, [&](int i) {
    const ChaosMeasure m = exponentiate(synth.synthesize(cfg.seed, first + i, level));
    PerReplica out;
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (regions == "blocks") {
        out.push_back(block_masses(m, cells[k]));
      } else {
        std::vector<double> v;
        const double r = c[k];
        const double margin = m.eps + r;
        std::vector<double> axis;
        for (double x = g.origin[0] + margin; x <= g.origin[0] + g.length - margin && axis.size() < 64; x += 2.0 * r)
          axis.push_back(x - g.origin[0]);
        const int d = g.dimension;
        std::size_t total = 1;
        for (int a = 0; a < d; ++a) total *= axis.size();
        for (std::size_t s = 0; s < total; ++s) {
          Ball b;
          b.radius = r;
          std::size_t code = s;
          for (int a = 0; a < d; ++a) {
            b.center[a] = g.origin[a] + axis[code % axis.size()];
            code /= axis.size();
          }
          v.push_back(region_mass(m, b, m.eps));
        }
        out.push_back(std::move(v));
      }
    }
    return out;
  });
  MomentSamples s;
  s.c = c;
  s.balls = regions == "balls";
  s.mass.assign(c.size(), std::vector<std::vector<double>>(per.size()));
  for (std::size_t r = 0; r < per.size(); ++r)
    for (std::size_t k = 0; k < c.size(); ++k) s.mass[k][r] = per[r][k];
  ScalingContext ctx{cfg.kernel.dimension, cfg.kernel.lambda2, R, h, param<int>(cfg, "jackknife_groups", 20)};
  ScalingReport rep = moment_scaling(s, p, ctx);
  if (samples_out) *samples_out = std::move(s);
  return rep;
}

ScaleInvarianceRun scale_invariance_experiment(const io::RunConfig& cfg) {
  if (!cfg.kernel.pure_logplus())
    throw std::invalid_argument("scale_invariance_test: the kernel has a remainder g != 0; exact scale invariance "
                                "holds only for lambda^2 ln+(R/|x|)");
  const double c = param<double>(cfg, "c", 0.5);
  const double side = param<double>(cfg, "side", 0.5);
  const int K = static_cast<int>(cfg.schedule.size()) - 1;
  if (K < 1) throw io::ConfigError("config: scale invariance needs at least two levels");
  if (std::abs(cfg.schedule[K] / cfg.schedule[K - 1] - c) > 1e-9)
    throw io::ConfigError("config: params.c must equal eps_K / eps_{K-1} so that m_eps(cA) pairs with m_{eps/c}(A)");
  if (side > cfg.kernel.scale) throw io::ConfigError("config: the reference box must lie within B(0, R)");
  const GridSpec& g = cfg.grid;
  std::vector<std::array<double, 3>> pos;
  if (cfg.params.contains("positions")) {
    for (const auto& p : cfg.params.at("positions")) {
      std::array<double, 3> a{0.0, 0.0, 0.0};
      const auto v = p.get<std::vector<double>>();
      for (std::size_t i = 0; i < v.size() && i < 3; ++i) a[i] = v[i];
      pos.push_back(a);
    }
  } else {
    pos = default_positions(g, side);
  }
  if (pos.empty()) throw io::ConfigError("config: no box positions fit the grid");
  const ShellLadder ladder = ladder_for(cfg);
  FieldSynthesizer synth(ladder, g);
  const std::uint64_t first = first_replica(cfg);
  const int n = cfg.replicas;
  auto masses = [&](std::uint64_t replica, int level, double s) {
    const ChaosMeasure m = exponentiate(synth.synthesize(cfg.seed, replica, level));
    std::vector<double> out;
    for (const auto& p : pos) {
      Box b;
      for (int a = 0; a < 3; ++a) {
        b.lo[a] = p[a];
        b.hi[a] = p[a] + (a < g.dimension ? s : 1.0);
      }
      out.push_back(std::log(region_mass(m, b, m.eps)));
    }
    return out;
  };
  using V = std::vector<double>;
  const auto small = map_indexed<V>(n, cfg.threads, [&](int i) { return masses(first + i, K, c * side); });
  const auto ref = map_indexed<V>(n, cfg.threads, [&](int i) { return masses(first + n + i, K - 1, side); });
  ScaleInvarianceRun run;
  for (const auto& v : small) run.log_small.insert(run.log_small.end(), v.begin(), v.end());
  for (const auto& v : ref) run.log_ref.insert(run.log_ref.end(), v.begin(), v.end());
  Stream rng(cfg.seed, first, 0, StreamTag::permutation);
  run.report = scale_invariance_test(cfg.kernel, c, run.log_small, run.log_ref, rng, param<int>(cfg, "permutations", 1000),
                                     param<double>(cfg, "alpha", 0.01));
  return run;
}

DegeneracyReport degeneracy_experiment(const io::RunConfig& cfg) {
  const std::vector<double> l2 = param<std::vector<double>>(cfg, "lambda2", {cfg.kernel.lambda2});
  const double alpha = param<double>(cfg, "alpha", 0.5);
  const std::uint64_t first = first_replica(cfg);
  const int d = cfg.kernel.dimension;
  const Box region = unit_box();
  if (!box_fits(cfg.grid, region, cfg.schedule.front()))
    throw io::ConfigError("config: [0, 1]^d must sit inside the grid with a margin of eps_0");
  std::vector<DegeneracyRun> runs;
  for (double lambda2 : l2) {
    KernelSpec k = cfg.kernel;
    k.lambda2 = lambda2;
    const ShellLadder ladder = build_ladder(k, cfg.mollifier.kind, cfg.schedule);
    FieldSynthesizer synth(ladder, cfg.grid);
    DegeneracyRun run;
    run.lambda2 = lambda2;
    run.eps = ladder.eps;
    run.mass = map_indexed<std::vector<double>>(cfg.replicas, cfg.threads, [&](int i) {
      std::vector<double> out;
      FieldSample s = synth.synthesize(cfg.seed, first + i, 0);
      for (int lev = 0; lev < synth.levels(); ++lev) {
        if (lev > 0) synth.refine(s);
        out.push_back(region_mass(exponentiate(s), region, s.eps));
      }
      return out;
    });
    runs.push_back(std::move(run));
  }
  return degeneracy_scan(runs, d, alpha, param<int>(cfg, "jackknife_groups", 20));
}

MomentEstimate fractional_moment(const io::RunConfig& cfg, double alpha) {
  const ShellLadder ladder = ladder_for(cfg);
  FieldSynthesizer synth(ladder, cfg.grid);
  const std::uint64_t first = first_replica(cfg);
  const int level = synth.levels() - 1;
  std::vector<Box> boxes{unit_box()};
  if (!box_fits(cfg.grid, boxes[0], cfg.mollifier.epsilon)) throw io::ConfigError("config: [0, 1]^d leaves the grid");
  if (box_fits(cfg.grid, unit_box(2.0), cfg.mollifier.epsilon)) boxes.push_back(unit_box(2.0));
  const auto per = map_indexed<double>(cfg.replicas, cfg.threads, [&](int i) {
    const ChaosMeasure m = exponentiate(synth.synthesize(cfg.seed, first + i, level));
    double s = 0.0;
    for (const auto& b : boxes) s += std::pow(region_mass(m, b, m.eps), alpha);
    return s / static_cast<double>(boxes.size());
  });
  MomentEstimate e;
  e.moment = stats::mean(per);
  e.se = stats::standard_error(per);
  e.samples = static_cast<int>(per.size() * boxes.size());
  return e;
}

MartingaleReport martingale_experiment(const io::RunConfig& cfg) {
  const ShellLadder ladder = ladder_for(cfg);
  FieldSynthesizer synth(ladder, cfg.grid);
  const std::uint64_t first = first_replica(cfg);
  const Box region = unit_box();
  if (!box_fits(cfg.grid, region, cfg.schedule.front()))
    throw io::ConfigError("config: [0, 1]^d must sit inside the grid with a margin of eps_0");
  const auto traces = map_indexed<std::vector<double>>(cfg.replicas, cfg.threads, [&](int i) {
    std::vector<double> out;
    FieldSample s = synth.synthesize(cfg.seed, first + i, 0);
    for (int lev = 0; lev < synth.levels(); ++lev) {
      if (lev > 0) synth.refine(s);
      out.push_back(region_mass(exponentiate(s), region, s.eps));
    }
    return out;
  });
  MartingaleReport rep;
  rep.eps = ladder.eps;
  for (int lev = 0; lev < synth.levels(); ++lev) {
    std::vector<double> col, inc;
    for (const auto& t : traces) {
      col.push_back(t[lev]);
      if (lev > 0) inc.push_back(t[lev] - t[lev - 1]);
    }
    rep.mean.push_back(stats::mean(col));
    rep.se.push_back(stats::standard_error(col));
    if (lev > 0) {
      rep.increment.push_back(stats::mean(inc));
      rep.increment_se.push_back(stats::standard_error(inc));
    }
  }
  return rep;
}

DissipationRun dissipation_experiment(const io::RunConfig& cfg) {
  if (cfg.kernel.dimension != 3) throw io::ConfigError("config: dissipation statistics need d = 3");
  const double R = cfg.kernel.scale;
  std::vector<double> ls = param<std::vector<double>>(cfg, "l", {});
  if (ls.empty())
    for (int k = 1; k <= 4; ++k) ls.push_back(R * std::ldexp(1.0, -k));
  const int per_axis = param<int>(cfg, "centers_per_axis", 4);
  const double mean_diss = param<double>(cfg, "mean_dissipation", 1.0);
  std::vector<std::array<double, 3>> centers;
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j)
      for (int k = 0; k < per_axis; ++k)
        centers.push_back({(i + 0.5) / per_axis, (j + 0.5) / per_axis, (k + 0.5) / per_axis});
  const ShellLadder ladder = ladder_for(cfg);
  FieldSynthesizer synth(ladder, cfg.grid);
  const std::uint64_t first = first_replica(cfg);
  const int level = synth.levels() - 1;
  using PerReplica = std::vector<std::vector<double>>;
  const auto per = map_indexed<PerReplica>(cfg.replicas, cfg.threads, [&](int i) {
    const ChaosMeasure m = exponentiate(synth.synthesize(cfg.seed, first + i, level));
    PerReplica out;
    for (double l : ls) {
      std::vector<double> v;
      for (const auto& s : dissipation_samples(m, centers, l, mean_diss, m.eps)) v.push_back(s.value);
      out.push_back(std::move(v));
    }
    return out;
  });
  DissipationRun run;
  run.centers = centers;
  run.input.l = ls;
  run.input.scale = R;
  run.input.mean_dissipation = mean_diss;
  run.input.value.assign(ls.size(), std::vector<std::vector<double>>(per.size()));
  for (std::size_t r = 0; r < per.size(); ++r)
    for (std::size_t k = 0; k < ls.size(); ++k) run.input.value[k][r] = per[r][k];
  run.report = lognormality_report(run.input, param<int>(cfg, "jackknife_groups", 20));
  return run;
}

MrwMoments mrw_moments(const io::RunConfig& cfg) {
  if (cfg.kernel.dimension != 1) throw io::ConfigError("config: the multifractal random walk needs d = 1");
  const std::vector<double> t = param<std::vector<double>>(cfg, "t", {0.25, 0.5, 1.0});
  const ShellLadder ladder = ladder_for(cfg);
  FieldSynthesizer synth(ladder, cfg.grid);
  const std::uint64_t first = first_replica(cfg);
  const int level = synth.levels() - 1;
  const auto per = map_indexed<std::vector<double>>(cfg.replicas, cfg.threads, [&](int i) {
    const ChaosMeasure m = exponentiate(synth.synthesize(cfg.seed, first + i, level));
    Stream bm(cfg.seed, first + i, 0, StreamTag::brownian);
    std::vector<double> x = mrw_path(m, 0.0, t, bm);
    for (double& v : x) v *= v;
    return x;
  });
  MrwMoments out;
  out.t = t;
  for (std::size_t k = 0; k < t.size(); ++k) {
    std::vector<double> col;
    for (const auto& v : per) col.push_back(v[k]);
    out.mean_square.push_back(stats::mean(col));
    out.se.push_back(stats::standard_error(col));
  }
  return out;
}

std::vector<QvRow> mrw_quadratic_variation(const io::RunConfig& cfg) {
  if (cfg.kernel.dimension != 1) throw io::ConfigError("config: the multifractal random walk needs d = 1");
  const double t_end = param<double>(cfg, "t_end", 1.0);
  const std::uint64_t parts = param<std::uint64_t>(cfg, "partitions", std::uint64_t{1} << 23);
  if (parts % 4 != 0) throw io::ConfigError("config: params.partitions must be a multiple of 4");
  const ShellLadder ladder = ladder_for(cfg);
  FieldSynthesizer synth(ladder, cfg.grid);
  const std::uint64_t first = first_replica(cfg);
  const int level = synth.levels() - 1;
  return map_indexed<QvRow>(cfg.replicas, cfg.threads, [&](int i) {
    const ChaosMeasure m = exponentiate(synth.synthesize(cfg.seed, first + i, level));
    Stream bm(cfg.seed, first + i, 0, StreamTag::brownian);
    const double dt = t_end / static_cast<double>(parts);
    // Stream the path in chunks; increments over 1, 2 and 4 fine steps give
    // the quadratic variation on the three nested partitions.
    const std::uint64_t chunk = 1u << 16;
    double qv[3] = {0.0, 0.0, 0.0};
    double acc2 = 0.0, acc4 = 0.0;
    double prev_mass = 0.0;
    std::vector<double> times;
    for (std::uint64_t start = 0; start < parts; start += chunk) {
      const std::uint64_t len = std::min(chunk, parts - start);
      times.resize(len);
      for (std::uint64_t j = 0; j < len; ++j) times[j] = static_cast<double>(start + j + 1) * dt;
      const std::vector<double> cum = cumulative_mass(m, 0.0, times);
      for (std::uint64_t j = 0; j < len; ++j) {
        const double dm = std::max(cum[j] - prev_mass, 0.0);
        prev_mass = cum[j];
        const double dx = std::sqrt(dm) * bm.normal();
        qv[2] += dx * dx;
        acc2 += dx;
        acc4 += dx;
        const std::uint64_t k = start + j + 1;
        if (k % 2 == 0) {
          qv[1] += acc2 * acc2;
          acc2 = 0.0;
        }
        if (k % 4 == 0) {
          qv[0] += acc4 * acc4;
          acc4 = 0.0;
        }
      }
    }
    QvRow row;
    row.replica = first + i;
    row.mass = prev_mass;
    for (double q : qv) {
      row.qv.push_back(q);
      row.rel_error.push_back(std::abs(q - prev_mass) / prev_mass);
    }
    return row;
  });
}

json to_json(const ScalingReport& r) {
  json pts = json::array(), fits = json::array();
  for (const auto& p : r.points)
    pts.push_back({{"p", p.p}, {"c", p.c}, {"moment", p.moment}, {"se", p.se}, {"heavy_tail", p.heavy_tail}});
  for (const auto& f : r.fits)
    fits.push_back({{"p", f.p},
                    {"zeta_hat", f.zeta_hat},
                    {"se", f.se},
                    {"ci", {f.ci_lo, f.ci_hi}},
                    {"zeta", f.zeta_analytic},
                    {"log_prefactor", f.log_prefactor},
                    {"r2", f.r2},
                    {"heavy_tail", f.heavy_tail}});
  return json{{"points", pts},         {"fits", fits},          {"c_min", r.c_min},
              {"c_max", r.c_max},      {"decades", r.decades},  {"range_ok", r.range_ok},
              {"concave", r.concave},  {"warnings", r.warnings}};
}

json to_json(const ScaleInvarianceReport& r) {
  return json{{"c", r.c},
              {"n_small", r.n_small},
              {"n_ref", r.n_ref},
              {"mean_shift", r.mean_shift},
              {"mean_shift_se", r.mean_shift_se},
              {"mean_target", r.mean_target},
              {"variance_gain", r.variance_gain},
              {"variance_gain_se", r.variance_gain_se},
              {"variance_target", r.variance_target},
              {"variance_small", r.variance_small},
              {"variance_ref", r.variance_ref},
              {"ks", r.ks},
              {"ks_critical", r.ks_critical},
              {"alpha", r.alpha},
              {"mean_ok", r.mean_ok},
              {"variance_ok", r.variance_ok},
              {"ks_ok", r.ks_ok}};
}

json to_json(const DegeneracyReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"lambda2", row.lambda2},
                    {"moment", row.moment},
                    {"moment_se", row.moment_se},
                    {"exponent", row.exponent},
                    {"exponent_se", row.exponent_se},
                    {"predicted", row.predicted},
                    {"last_drift", row.last_drift},
                    {"verdict", row.verdict}});
  return json{{"dimension", r.dimension}, {"alpha", r.alpha}, {"rows", rows}};
}

json to_json(const LognormalityReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"l", row.l},
                    {"mean", row.mean},
                    {"mean_se", row.mean_se},
                    {"log_variance", row.log_variance},
                    {"log_variance_se", row.log_variance_se},
                    {"skewness", row.skewness},
                    {"skewness_se", row.skewness_se},
                    {"kurtosis", row.kurtosis},
                    {"kurtosis_se", row.kurtosis_se}});
  return json{{"rows", rows},
              {"slope", r.slope},
              {"slope_se", r.slope_se},
              {"intercept", r.intercept},
              {"intercept_se", r.intercept_se}};
}

json to_json(const MartingaleReport& r) {
  return json{{"eps", r.eps},
              {"mean", r.mean},
              {"se", r.se},
              {"increment", r.increment},
              {"increment_se", r.increment_se}};
}

}  // namespace gmc::experiments
