// SPDX-License-Identifier: Apache-2.0
// Thin bindings. Configs and reports cross the boundary as JSON text; the
// Python package wraps them in dicts.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gmc/estimators.hpp"
#include "gmc/experiments.hpp"
#include "gmc/io.hpp"
#include "gmc/kernels.hpp"
#include "gmc/oracles.hpp"
#include "gmc/spectral.hpp"

namespace py = pybind11;
using gmc::io::json;

namespace {

gmc::io::RunConfig parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw gmc::io::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return gmc::io::parse_config(j);
}

py::array_t<double> to_array(const std::vector<double>& v, int dimension, int n) {
  std::vector<py::ssize_t> shape(dimension, n);
  py::array_t<double> a(shape);
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

std::string profile_json(const gmc::SpectralProfile& p) {
  return json{{"dimension", p.dimension},
              {"xi", p.xi},
              {"fhat", p.fhat},
              {"err", p.err},
              {"certificate", gmc::to_string(p.certificate)},
              {"negative_points", p.negative_points},
              {"converged_points", p.converged_points}}
      .dump();
}

}  // namespace

PYBIND11_MODULE(_gmc, m) {
  m.doc() = "Gaussian multiplicative chaos lab";
  gmc::experiments::configure_allocator();

  static py::exception<gmc::io::ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  static py::exception<gmc::experiments::GateError> gate_error(m, "GateError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const gmc::experiments::GateError& e) {
      py::set_error(gate_error, (std::string(e.what()) + "\n" + e.detail.dump()).c_str());
    } catch (const gmc::io::ConfigError& e) {
      py::set_error(config_error, e.what());
    }
  });

  m.def("zeta", &gmc::zeta, py::arg("p"), py::arg("d"), py::arg("lambda2"));
  m.def("p_star", &gmc::p_star, py::arg("d"), py::arg("lambda2"));
  m.def("logplus_hat", &gmc::logplus_hat, py::arg("d"), py::arg("xi"), py::arg("T") = 1.0);

  m.def(
      "kernel_value",
      [](const std::string& kernel_json, double r) -> py::object {
        const auto k = gmc::io::kernel_from_json(json::parse(kernel_json));
        const auto v = gmc::eval_kernel(k, r);
        if (v.singular) return py::float_(std::numeric_limits<double>::infinity());
        return py::float_(v.value);
      },
      py::arg("kernel_json"), py::arg("r"));

  m.def(
      "positivity_certificate",
      [](int d, double T) {
        py::gil_scoped_release release;
        return profile_json(gmc::experiments::positivity_certificate(d, T));
      },
      py::arg("d"), py::arg("T") = 1.0);

  m.def("config_digest", [](const std::string& text) { return parse(text).digest(); });
  m.def("gate", [](const std::string& text) { gmc::experiments::gate(parse(text)); });

  m.def(
      "simulate",
      [](const std::string& text) {
        const auto cfg = parse(text);
        gmc::experiments::SimulateResult r;
        {
          py::gil_scoped_release release;
          r = gmc::experiments::simulate(cfg);
        }
        py::list out;
        for (std::size_t i = 0; i < r.fields.size(); ++i) {
          const auto& f = r.fields[i];
          py::dict d;
          d["replica"] = f.replica;
          d["eps"] = f.eps;
          d["level"] = f.level;
          d["variance"] = f.variance;
          d["field"] = to_array(f.values, f.grid.dimension, f.grid.n);
          d["measure"] = to_array(r.measures[i].mass, f.grid.dimension, f.grid.n);
          d["ladder_digest"] = f.ladder_digest;
          out.append(d);
        }
        return out;
      },
      py::arg("config_json"));

  m.def(
      "zeta_experiment",
      [](const std::string& text) {
        const auto cfg = parse(text);
        py::gil_scoped_release release;
        gmc::experiments::gate(cfg);
        return gmc::experiments::to_json(gmc::experiments::zeta_experiment(cfg)).dump();
      },
      py::arg("config_json"));

  m.def(
      "run_oracles",
      [](std::uint64_t seed, std::uint64_t mc_samples, int instances) {
        py::gil_scoped_release release;
        gmc::oracles::SuiteOptions opt;
        opt.seed = seed;
        opt.mc_samples = mc_samples;
        opt.instances = instances;
        return gmc::oracles::run_suite(opt).to_json().dump();
      },
      py::arg("seed") = 1, py::arg("mc_samples") = 1000000, py::arg("instances") = 20);

  m.def(
      "read_grid",
      [](const std::string& path) {
        json header;
        const auto values = gmc::io::read_grid(path, &header);
        const auto& g = header.at("grid");
        return py::make_tuple(header.dump(), to_array(values, g.at("dimension").get<int>(), g.at("n").get<int>()));
      },
      py::arg("path"));
}
