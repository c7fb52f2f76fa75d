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

#include "retroq/config.hpp"

#include <cmath>

#include "retroq/errors.hpp"

namespace retroq {

namespace {

const json& require(const json& j, const std::string& key,
                    const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(where + ": missing required key '" + key + "'");
  }
  return j.at(key);
}

double require_number(const json& j, const std::string& key,
                      const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number()) {
    throw ParseError(where + "." + key + ": expected a number");
  }
  return v.get<double>();
}

std::string require_string(const json& j, const std::string& key,
                           const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_string()) {
    throw ParseError(where + "." + key + ": expected a string");
  }
  return v.get<std::string>();
}

InterventionSpec intervention_from_json(const json& j,
                                        const std::string& where) {
  InterventionSpec iv;
  iv.tau = require_number(j, "tau", where);
  const double pd = require_number(j, "probe_dim", where);
  iv.probe_dim = static_cast<Eigen::Index>(std::llround(pd));
  iv.probe_state = matrix_from_json(require(j, "probe_state", where),
                                    where + ".probe_state");
  iv.coupling =
      matrix_from_json(require(j, "coupling", where), where + ".coupling");
  const json& outs = require(j, "outcomes", where);
  if (!outs.is_array() || outs.empty()) {
    throw ParseError(where + ".outcomes: expected a nonempty array");
  }
  for (std::size_t m = 0; m < outs.size(); ++m) {
    const std::string owhere =
        where + ".outcomes[" + std::to_string(m) + "]";
    OutcomeSpec oc;
    oc.label = require_string(outs[m], "label", owhere);
    oc.projector = matrix_from_json(require(outs[m], "projector", owhere),
                                    owhere + ".projector");
    iv.outcomes.push_back(std::move(oc));
  }
  return iv;
}

json intervention_to_json(const InterventionSpec& iv) {
  json j;
  j["tau"] = iv.tau;
  j["probe_dim"] = iv.probe_dim;
  j["probe_state"] = matrix_to_json(iv.probe_state);
  j["coupling"] = matrix_to_json(iv.coupling);
  json outs = json::array();
  for (const auto& oc : iv.outcomes) {
    json o;
    o["label"] = oc.label;
    o["projector"] = matrix_to_json(oc.projector);
    outs.push_back(std::move(o));
  }
  j["outcomes"] = std::move(outs);
  return j;
}

}  // namespace

RunConfig config_from_json(const json& root) {
  RunConfig config;
  const json& ex = require(root, "experiment", "config");
  const std::string where = "config.experiment";

  auto& model = config.experiment.model;
  model.dim = static_cast<Eigen::Index>(
      std::llround(require_number(ex, "dim", where)));
  model.hamiltonian =
      matrix_from_json(require(ex, "hamiltonian", where), where + ".hamiltonian");
  const json& couplings = require(ex, "couplings", where);
  if (!couplings.is_array()) {
    throw ParseError(where + ".couplings: expected an array of matrices");
  }
  for (std::size_t k = 0; k < couplings.size(); ++k) {
    model.couplings.push_back(matrix_from_json(
        couplings[k], where + ".couplings[" + std::to_string(k) + "]"));
  }
  const json& etas = require(ex, "efficiencies", where);
  if (!etas.is_array()) {
    throw ParseError(where + ".efficiencies: expected an array of numbers");
  }
  for (std::size_t k = 0; k < etas.size(); ++k) {
    if (!etas[k].is_number()) {
      throw ParseError(where + ".efficiencies[" + std::to_string(k) +
                       "]: expected a number");
    }
    model.efficiencies.push_back(etas[k].get<double>());
  }
  config.experiment.initial_state = matrix_from_json(
      require(ex, "initial_state", where), where + ".initial_state");
  config.experiment.horizon = require_number(ex, "horizon", where);
  config.experiment.dt = require_number(ex, "dt", where);
  if (ex.contains("seed")) {
    if (!ex["seed"].is_number_integer()) {
      throw ParseError(where + ".seed: expected an integer");
    }
    config.experiment.seed = ex["seed"].get<std::uint64_t>();
  }
  if (ex.contains("interventions")) {
    const json& ivs = ex["interventions"];
    if (!ivs.is_array()) {
      throw ParseError(where + ".interventions: expected an array");
    }
    for (std::size_t i = 0; i < ivs.size(); ++i) {
      config.experiment.interventions.push_back(intervention_from_json(
          ivs[i], where + ".interventions[" + std::to_string(i) + "]"));
    }
  }

  // Snap intervention times onto the grid before validation.
  if (config.experiment.dt > 0.0) {
    for (std::size_t i = 0; i < config.experiment.interventions.size(); ++i) {
      auto& iv = config.experiment.interventions[i];
      const double snapped =
          config.experiment.grid_step(iv) * config.experiment.dt;
      if (std::abs(snapped - iv.tau) >
          1e-12 * std::max(1.0, std::abs(iv.tau))) {
        config.warnings.push_back(
            "interventions[" + std::to_string(i) + "].tau snapped from " +
            std::to_string(iv.tau) + " to " + std::to_string(snapped));
      }
      iv.tau = snapped;
    }
  }

  if (root.contains("observables")) {
    const json& obs = root["observables"];
    if (!obs.is_array()) {
      throw ParseError("config.observables: expected an array");
    }
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string owhere =
          "config.observables[" + std::to_string(i) + "]";
      NamedObservable o;
      o.name = require_string(obs[i], "name", owhere);
      o.matrix = matrix_from_json(require(obs[i], "matrix", owhere),
                                  owhere + ".matrix");
      if (o.matrix.rows() != config.experiment.model.dim ||
          o.matrix.cols() != config.experiment.model.dim) {
        throw ParseError(owhere + ".matrix: shape does not match dim");
      }
      config.observables.push_back(std::move(o));
    }
  }
  if (root.contains("ensemble")) {
    if (!root["ensemble"].is_number_integer() ||
        root["ensemble"].get<long>() < 1) {
      throw ParseError("config.ensemble: expected a positive integer");
    }
    config.ensemble = root["ensemble"].get<int>();
  }
  if (root.contains("time_unit")) {
    if (!root["time_unit"].is_string()) {
      throw ParseError("config.time_unit: expected a string");
    }
    config.time_unit = root["time_unit"].get<std::string>();
  }

  validate_or_throw(config.experiment);
  return config;
}

RunConfig load_config(const std::string& path) {
  return config_from_json(read_json(path, "config"));
}

json config_to_json(const RunConfig& config) {
  json ex;
  ex["dim"] = config.experiment.model.dim;
  ex["hamiltonian"] = matrix_to_json(config.experiment.model.hamiltonian);
  json couplings = json::array();
  for (const auto& l : config.experiment.model.couplings) {
    couplings.push_back(matrix_to_json(l));
  }
  ex["couplings"] = std::move(couplings);
  ex["efficiencies"] = config.experiment.model.efficiencies;
  ex["initial_state"] = matrix_to_json(config.experiment.initial_state);
  ex["horizon"] = config.experiment.horizon;
  ex["dt"] = config.experiment.dt;
  ex["seed"] = config.experiment.seed;
  json ivs = json::array();
  for (const auto& iv : config.experiment.interventions) {
    ivs.push_back(intervention_to_json(iv));
  }
  ex["interventions"] = std::move(ivs);

  json root;
  root["experiment"] = std::move(ex);
  json obs = json::array();
  for (const auto& o : config.observables) {
    json oj;
    oj["name"] = o.name;
    oj["matrix"] = matrix_to_json(o.matrix);
    obs.push_back(std::move(oj));
  }
  root["observables"] = std::move(obs);
  root["ensemble"] = config.ensemble;
  root["time_unit"] = config.time_unit;
  return root;
}

}  // namespace retroq
