// Copyright 2026 The Retroq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "retroq/config.hpp"
#include "retroq/errors.hpp"
#include "retroq/io.hpp"
#include "retroq/trajectory.hpp"

using namespace retroq;

namespace {

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "retroq_cfg_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string scratch(const std::string& name) {
  return (scratch_dir() / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
}

json minimal_config() {
  json j;
  j["experiment"]["dim"] = 2;
  j["experiment"]["hamiltonian"] = {{0.0, 0.0}, {0.0, 0.0}};
  j["experiment"]["couplings"] = json::array({json({{0.0, 0.0}, {0.0, 0.0}})});
  j["experiment"]["couplings"][0] = matrix_to_json(pauli_z());
  j["experiment"]["efficiencies"] = {1.0};
  j["experiment"]["initial_state"] = {{0.5, 0.5}, {0.5, 0.5}};
  j["experiment"]["horizon"] = 1.0;
  j["experiment"]["dt"] = 0.01;
  j["experiment"]["seed"] = 9;
  return j;
}

json cnot_intervention(double tau) {
  json iv;
  iv["tau"] = tau;
  iv["probe_dim"] = 2;
  iv["probe_state"] = {{1.0, 0.0}, {0.0, 0.0}};
  iv["coupling"] = {{1.0, 0.0, 0.0, 0.0},
                    {0.0, 1.0, 0.0, 0.0},
                    {0.0, 0.0, 0.0, 1.0},
                    {0.0, 0.0, 1.0, 0.0}};
  iv["outcomes"] = json::array();
  iv["outcomes"].push_back(
      {{"label", "0"}, {"projector", {{1.0, 0.0}, {0.0, 0.0}}}});
  iv["outcomes"].push_back(
      {{"label", "1"}, {"projector", {{0.0, 0.0}, {0.0, 1.0}}}});
  return iv;
}

MeasurementRecord random_record(Eigen::Index nc, Eigen::Index n, double dt,
                                std::uint64_t seed) {
  MeasurementRecord rec;
  rec.dt = dt;
  rec.increments.resize(nc, n);
  RandomStream rng(seed, 0);
  for (Eigen::Index k = 0; k < nc; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      rec.increments(k, i) = rng.gaussian_increment(dt);
    }
  }
  return rec;
}

}  // namespace

TEST_CASE("matrix json roundtrip is exact") {
  RandomStream rng(61, 0);
  CMatrix m(3, 2);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      m(i, j) = complexd(rng.normal() * 1e-7, rng.normal() * 1e5);
    }
  }
  // Through the in-memory document and through a serialized file.
  const CMatrix back = matrix_from_json(matrix_to_json(m), "test");
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
  const std::string path = scratch("matrix.json");
  write_json(path, matrix_to_json(m));
  const CMatrix loaded = matrix_from_json(read_json(path, "matrix"), "test");
  CHECK((loaded - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("matrix parsing accepts scalars and rejects junk") {
  const json plain = {{1.0, 2.0}, {3.0, 4.0}};
  const CMatrix m = matrix_from_json(plain, "test");
  CHECK(m(1, 0) == complexd(3.0, 0.0));
  CHECK_THROWS_AS(matrix_from_json(json::array(), "test"), ParseError);
  json ragged = {{1.0, 2.0}, {3.0}};
  CHECK_THROWS_AS(matrix_from_json(ragged, "test"), ParseError);
  json bad = {{json::array({1.0, 2.0, 3.0})}};
  CHECK_THROWS_AS(matrix_from_json(bad, "test"), ParseError);
}

TEST_CASE("record csv roundtrip is bitwise") {
  const MeasurementRecord rec = random_record(2, 50, 0.025, 99);
  const std::string path = scratch("record.csv");
  write_record_csv(path, rec);
  const MeasurementRecord back = read_record_csv(path);
  CHECK(back.dt == rec.dt);
  CHECK(back.n_channels() == 2);
  CHECK(back.n_steps() == 50);
  CHECK((back.increments - rec.increments).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("record csv rejects malformed input") {
  const std::string path = scratch("bad.csv");
  SUBCASE("wrong header") {
    write_text(path, "time,dY_1\n0,0.1\n0.01,0.2\n");
    CHECK_THROWS_AS(read_record_csv(path), ParseError);
  }
  SUBCASE("wrong channel name") {
    write_text(path, "t,dZ_1\n0,0.1\n0.01,0.2\n");
    CHECK_THROWS_AS(read_record_csv(path), ParseError);
  }
  SUBCASE("ragged row") {
    write_text(path, "t,dY_1\n0,0.1\n0.01,0.2,0.3\n");
    CHECK_THROWS_AS(read_record_csv(path), ParseError);
  }
  SUBCASE("unparseable number") {
    write_text(path, "t,dY_1\n0,0.1\n0.01,zap\n");
    CHECK_THROWS_WITH_AS(read_record_csv(path),
                         doctest::Contains("cannot parse number"), ParseError);
  }
  SUBCASE("nonuniform grid") {
    write_text(path, "t,dY_1\n0,0.1\n0.01,0.2\n0.035,0.3\n");
    CHECK_THROWS_AS(read_record_csv(path), ParseError);
  }
  SUBCASE("single row") {
    write_text(path, "t,dY_1\n0,0.1\n");
    CHECK_THROWS_AS(read_record_csv(path), ParseError);
  }
  SUBCASE("no rows") {
    write_text(path, "t,dY_1\n");
    CHECK_THROWS_AS(read_record_csv(path), ParseError);
  }
  SUBCASE("does not start at zero") {
    write_text(path, "t,dY_1\n0.01,0.1\n0.02,0.2\n");
    CHECK_THROWS_AS(read_record_csv(path), ParseError);
  }
}

TEST_CASE("outcomes json roundtrip") {
  const std::string path = scratch("outcomes.json");
  write_outcomes_json(path, {0.25, 0.5}, {"up", "down"});
  const auto labels = read_outcomes_json(path);
  CHECK(labels == std::vector<std::string>{"up", "down"});
  const json j = read_json(path, "outcomes");
  CHECK(j["taus"].size() == 2);
  CHECK(j["taus"][1].get<double>() == 0.5);
}

TEST_CASE("config document parses normalizes and echoes exactly") {
  json j = minimal_config();
  j["experiment"]["interventions"] = json::array({cnot_intervention(0.5)});
  j["observables"] = json::array();
  j["observables"].push_back({{"name", "z"}, {"matrix", matrix_to_json(pauli_z())}});
  j["ensemble"] = 3;
  j["time_unit"] = "1/gamma";

  const RunConfig config = config_from_json(j);
  CHECK(config.warnings.empty());
  CHECK(config.ensemble == 3);
  CHECK(config.time_unit == "1/gamma");
  CHECK(config.experiment.seed == 9);
  REQUIRE(config.observables.size() == 1);
  CHECK(config.experiment.interventions.size() == 1);
  CHECK(config.experiment.model.n_channels() == 1);

  const json echoed = config_to_json(config);
  const RunConfig again = config_from_json(echoed);
  CHECK(again.warnings.empty());
  CHECK(config_to_json(again) == echoed);
  CHECK((again.experiment.initial_state - config.experiment.initial_state)
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK(again.experiment.dt == config.experiment.dt);
}

TEST_CASE("intervention times snap onto the grid with a warning") {
  json j = minimal_config();
  j["experiment"]["interventions"] =
      json::array({cnot_intervention(0.500000001)});
  const RunConfig config = config_from_json(j);
  REQUIRE(config.warnings.size() == 1);
  CHECK(config.warnings[0].find("snapped") != std::string::npos);
  CHECK(config.experiment.interventions[0].tau == 0.5);

  // A tau on the grid up to double rounding stays silent.
  json k = minimal_config();
  k["experiment"]["interventions"] = json::array({cnot_intervention(0.5)});
  CHECK(config_from_json(k).warnings.empty());
}

TEST_CASE("missing keys report their path") {
  json j = minimal_config();
  j["experiment"].erase("couplings");
  CHECK_THROWS_WITH_AS(config_from_json(j),
                       doctest::Contains("missing required key 'couplings'"),
                       ParseError);
  json k = minimal_config();
  k.erase("experiment");
  CHECK_THROWS_WITH_AS(config_from_json(k),
                       doctest::Contains("experiment"), ParseError);
}

TEST_CASE("structural problems surface as validation errors") {
  json j = minimal_config();
  j["experiment"]["efficiencies"] = {1.4};
  CHECK_THROWS_AS(config_from_json(j), ValidationError);
  json k = minimal_config();
  k["observables"] =
      json::array({json({{"name", "big"},
                         {"matrix", matrix_to_json(identity(3))}})});
  CHECK_THROWS_AS(config_from_json(k), ParseError);
}

TEST_CASE("load_config reads files and rejects broken ones") {
  const std::string good = scratch("good_config.json");
  write_json(good, minimal_config());
  const RunConfig config = load_config(good);
  CHECK(config.experiment.n_steps() == 100);

  const std::string broken = scratch("broken_config.json");
  write_text(broken, "{ not json");
  CHECK_THROWS_AS(load_config(broken), ParseError);
  CHECK_THROWS_AS(load_config(scratch("missing_config.json")), ParseError);
}

TEST_CASE("expectation csv has the promised layout") {
  const std::string path = scratch("expectations.csv");
  write_expectations_csv(path, {"x", "z"}, 0.5, {{1.0, 0.0}, {0.5, -0.5}});
  std::ifstream is(path);
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line == "t,x,z");
  REQUIRE(std::getline(is, line));
  CHECK(line == "0,1,0");
  REQUIRE(std::getline(is, line));
  CHECK(line == "0.5,0.5,-0.5");
}

TEST_CASE("retrodiction serializes its full summary") {
  RetrodictionResult r;
  r.taus = {0.5};
  r.outcome_labels = {{"0"}, {"1"}};
  r.probabilities = {0.25, 0.75};
  r.normalizer = 0.125;
  r.log_scale = -3.5;
  const json j = retrodiction_to_json(r);
  CHECK(j["taus"][0].get<double>() == 0.5);
  CHECK(j["outcome_labels"][1][0].get<std::string>() == "1");
  CHECK(j["probabilities"][1].get<double>() == 0.75);
  CHECK(j["normalizer"].get<double>() == 0.125);
  CHECK(j["log_scale"].get<double>() == -3.5);
}
