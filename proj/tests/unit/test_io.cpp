// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "gmc/experiments.hpp"
#include "gmc/io.hpp"

using namespace gmc;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({"dimension": 1, "lambda2": 0.5, "scale": 1.0,
    "mollifier": {"kind": "gaussian", "epsilon": 0.015625},
    "grid": {"n": 1024, "length": 4.0, "origin": [-1.5]},
    "seed": 7, "replicas": 2})");
}

std::string tmpdir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("gmc_unit_" + name);
  std::filesystem::remove_all(p);
  return p.string();
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("config parsing fills the ladder and round-trips") {
    const auto cfg = io::parse_config(minimal());
    CHECK(cfg.schedule == std::vector<double>{0.125, 0.0625, 0.03125, 0.015625});
    CHECK(cfg.seed == 7);
    const auto again = io::parse_config(cfg.to_json());
    CHECK(again.digest() == cfg.digest());
    auto other = cfg;
    other.seed = 8;
    CHECK(other.digest() != cfg.digest());
    other = cfg;
    other.out = "elsewhere";
    other.threads = 4;
    CHECK(other.digest() == cfg.digest());
  }

  TEST_CASE("malformed configs raise config errors") {
    auto j = minimal();
    j.erase("mollifier");
    CHECK_THROWS_AS(io::parse_config(j), io::ConfigError);
    j = minimal();
    j["lambda2"] = "big";
    CHECK_THROWS_AS(io::parse_config(j), io::ConfigError);
    j = minimal();
    j["eps0"] = 0.1;
    CHECK_THROWS_AS(io::parse_config(j), io::ConfigError);
    j = minimal();
    j["mollifier"]["kind"] = "box";
    CHECK_THROWS_AS(io::parse_config(j), io::ConfigError);
    j = minimal();
    j["remainder"] = {{"kind", "table"}, {"table", {{0.0, 0.1}, {1.0, 0.0}}}};
    CHECK(io::parse_config(j).kernel.remainder.r.size() == 2);
  }

  TEST_CASE("the gate orders scalar checks, positivity, validation") {
    auto j = minimal();
    j["lambda2"] = 2.0;
    CHECK_THROWS_AS(experiments::gate(io::parse_config(j)), io::ConfigError);
    j = minimal();
    j["dimension"] = 4;
    j["grid"]["origin"] = {0, 0, 0, 0};
    const auto cfg = io::parse_config(j);
    CHECK_THROWS_AS(experiments::gate(cfg), experiments::GateError);
    CHECK_NOTHROW(experiments::gate(io::parse_config(minimal())));
  }

  TEST_CASE("binary grids round-trip bit-exactly") {
    const std::string dir = tmpdir("grid");
    const std::vector<double> v{1.0, -0.0, 3.25e-300, 1e300, 0.1};
    io::write_grid(dir + "/g.bin", json{{"kind", "field"}, {"config_digest", "abc"}}, v);
    json h;
    const auto back = io::read_grid(dir + "/g.bin", &h);
    CHECK(back == v);
    CHECK(std::signbit(back[1]));
    CHECK(h["config_digest"] == "abc");
    CHECK(h["count"] == 5);
  }

  TEST_CASE("csv files carry the config digest") {
    const std::string dir = tmpdir("csv");
    io::write_csv(dir + "/a.csv", {"x", "y"}, std::vector<std::vector<double>>{{0.1, 2.0}}, "feed");
    std::ifstream in(dir + "/a.csv");
    std::string first, header, row;
    std::getline(in, first);
    std::getline(in, header);
    std::getline(in, row);
    CHECK(first == "# config_digest: feed");
    CHECK(header == "x,y");
    CHECK(std::stod(row.substr(0, row.find(','))) == 0.1);
  }

  TEST_CASE("thread resolution") {
    CHECK(experiments::resolve_threads(3) == 3);
    setenv("GMC_LAB_THREADS", "2", 1);
    CHECK(experiments::resolve_threads(0) == 2);
    setenv("GMC_LAB_THREADS", "lots", 1);
    CHECK_THROWS_AS(experiments::resolve_threads(0), io::ConfigError);
    unsetenv("GMC_LAB_THREADS");
    CHECK(experiments::resolve_threads(0) == 1);
  }

  TEST_CASE("results do not depend on the thread count") {
    auto cfg = io::parse_config(minimal());
    cfg.replicas = 6;
    cfg.threads = 1;
    const auto a = experiments::fractional_moment(cfg, 0.5);
    cfg.threads = 3;
    const auto b = experiments::fractional_moment(cfg, 0.5);
    CHECK(a.moment == b.moment);
    CHECK(a.se == b.se);
  }
}
