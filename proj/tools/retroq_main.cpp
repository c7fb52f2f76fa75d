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

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "retroq/config.hpp"
#include "retroq/errors.hpp"
#include "retroq/filter.hpp"
#include "retroq/io.hpp"
#include "retroq/oracle.hpp"
#include "retroq/smoother.hpp"
#include "retroq/trajectory.hpp"
#include "retroq/verify.hpp"

namespace {

namespace fs = std::filesystem;
using namespace retroq;

struct Options {
  std::string config_path;
  std::string out_dir = "out";
  std::string record_path;
  std::string outcomes_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> ensemble;
  std::vector<int> checks;
};

std::string out_path(const Options& opt, const std::string& name) {
  return (fs::path(opt.out_dir) / name).string();
}

std::string indexed(const std::string& stem, int index, int total,
                    const std::string& ext) {
  if (total <= 1) return stem + ext;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_%04d", index);
  return stem + buf + ext;
}

RunConfig load(const Options& opt) {
  if (opt.config_path.empty()) {
    throw ParseError("--config is required for this command");
  }
  RunConfig config = load_config(opt.config_path);
  if (opt.seed) config.experiment.seed = *opt.seed;
  if (opt.ensemble) config.ensemble = *opt.ensemble;
  for (const auto& w : config.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  return config;
}

MeasurementRecord load_record(const Options& opt) {
  if (opt.record_path.empty()) {
    throw ParseError("--record is required for this command");
  }
  return read_record_csv(opt.record_path);
}

std::vector<std::string> load_revealed(const Options& opt,
                                       const RunConfig& config) {
  if (opt.outcomes_path.empty()) return {};
  auto labels = read_outcomes_json(opt.outcomes_path);
  if (labels.size() != config.experiment.interventions.size()) {
    throw ParseError("outcomes file lists " + std::to_string(labels.size()) +
                     " labels, config has " +
                     std::to_string(config.experiment.interventions.size()) +
                     " interventions");
  }
  return labels;
}

std::vector<double> intervention_taus(const ExperimentSpec& spec) {
  std::vector<double> taus;
  for (const auto& iv : spec.interventions) taus.push_back(iv.tau);
  return taus;
}

void write_expectations(const Options& opt, const std::string& name,
                        const RunConfig& config,
                        const std::vector<CMatrix>& states) {
  if (config.observables.empty()) return;
  std::vector<std::string> names;
  for (const auto& o : config.observables) names.push_back(o.name);
  std::vector<std::vector<double>> rows;
  rows.reserve(states.size());
  for (const auto& rho : states) {
    std::vector<double> row;
    for (const auto& o : config.observables) {
      row.push_back(trace_of_product(rho, o.matrix).real());
    }
    rows.push_back(std::move(row));
  }
  write_expectations_csv(out_path(opt, name), names, config.experiment.dt,
                         rows);
}

int cmd_simulate(const Options& opt) {
  RunConfig config = load(opt);
  fs::create_directories(opt.out_dir);
  write_json(out_path(opt, "config_echo.json"), config_to_json(config));
  const int n = config.ensemble;
  for (int i = 0; i < n; ++i) {
    SimulateOptions sopt;
    sopt.trajectory_index = static_cast<std::uint64_t>(i);
    sopt.store_states = !config.observables.empty();
    const auto traj = simulate(config.experiment, sopt);
    write_record_csv(out_path(opt, indexed("record", i, n, ".csv")),
                     traj.record);
    if (!config.experiment.interventions.empty()) {
      write_outcomes_json(out_path(opt, indexed("outcomes", i, n, ".json")),
                          intervention_taus(config.experiment),
                          traj.intervention_outcomes);
    }
    if (sopt.store_states) {
      write_expectations(opt, indexed("expectations", i, n, ".csv"), config,
                         traj.states);
    }
  }
  std::cout << "simulated " << n << (n == 1 ? " trajectory" : " trajectories")
            << " of " << config.experiment.n_steps() << " steps into "
            << opt.out_dir << "\n";
  return 0;
}

int cmd_filter(const Options& opt) {
  RunConfig config = load(opt);
  const auto record = load_record(opt);
  const auto revealed = load_revealed(opt, config);
  fs::create_directories(opt.out_dir);
  const auto states = run_filter(record, config.experiment, revealed);

  json out;
  out["t"] = states.back().t;
  out["log_likelihood"] = log_likelihood(states.back());
  out["state"] = matrix_to_json(states.back().rho);
  write_json(out_path(opt, "final_state.json"), out);

  if (!config.observables.empty()) {
    std::vector<CMatrix> rhos;
    rhos.reserve(states.size());
    for (const auto& s : states) rhos.push_back(s.rho);
    write_expectations(opt, "expectations.csv", config, rhos);
  }
  std::cout << "filtered " << record.n_steps() << " steps, log likelihood "
            << log_likelihood(states.back()) << "\n";
  return 0;
}

int cmd_smooth(const Options& opt) {
  RunConfig config = load(opt);
  const auto record = load_record(opt);
  const auto revealed = load_revealed(opt, config);
  fs::create_directories(opt.out_dir);
  const auto series = past_state_series(record, config.experiment, revealed);

  json entries = json::array();
  for (const auto& pair : series) {
    json e;
    e["t"] = pair.state.t;
    const double tr_s = pair.state.rho.trace().real();
    const double tr_e = pair.effect.trace().real();
    e["state"] = matrix_to_json(CMatrix(pair.state.rho / tr_s));
    e["effect"] = matrix_to_json(CMatrix(pair.effect / tr_e));
    e["log_weight"] = log_pair_weight(pair);
    entries.push_back(std::move(e));
  }
  json out;
  out["dt"] = record.dt;
  out["entries"] = std::move(entries);
  write_json(out_path(opt, "past_state.json"), out);
  std::cout << "smoothed " << record.n_steps() << " steps into "
            << out_path(opt, "past_state.json") << "\n";
  return 0;
}

int cmd_retrodict(const Options& opt) {
  RunConfig config = load(opt);
  const auto record = load_record(opt);
  if (config.experiment.interventions.empty()) {
    throw ValidationError(
        "retrodict: config declares no interventions to retrodict");
  }
  fs::create_directories(opt.out_dir);
  const auto result =
      config.experiment.interventions.size() == 1
          ? retrodict_single(record, config.experiment)
          : retrodict_multi(record, config.experiment);
  write_json(out_path(opt, "retrodiction.json"), retrodiction_to_json(result));
  std::cout << "retrodicted " << result.probabilities.size()
            << " outcome tuples into "
            << out_path(opt, "retrodiction.json") << "\n";
  return 0;
}

int cmd_verify(const Options& opt) {
  std::vector<CheckResult> results;
  if (opt.checks.empty()) {
    results = run_verification();
  } else {
    for (int c : opt.checks) results.push_back(run_check(c));
  }
  bool all_pass = true;
  json checks = json::array();
  for (const auto& r : results) {
    std::cout << format_check(r) << "\n";
    all_pass = all_pass && r.pass;
    json c;
    c["id"] = r.id;
    c["description"] = r.description;
    c["pass"] = r.pass;
    c["measured"] = r.measured;
    c["threshold"] = r.threshold;
    c["compare"] = r.compare;
    c["runtime_seconds"] = r.runtime_seconds;
    c["detail"] = r.detail;
    checks.push_back(std::move(c));
  }
  fs::create_directories(opt.out_dir);
  json report;
  report["checks"] = std::move(checks);
  report["all_pass"] = all_pass;
  write_json(out_path(opt, "verify_report.json"), report);
  std::cout << (all_pass ? "all checks passed" : "CHECKS FAILED") << "\n";
  return all_pass ? 0 : 1;
}

void write_error(const Options& opt, const std::string& kind,
                 const std::string& message) {
  try {
    fs::create_directories(opt.out_dir);
    json e;
    e["error"] = kind;
    e["message"] = message;
    write_json(out_path(opt, "error.json"), e);
  } catch (...) {
    // Reporting must not mask the original failure.
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous measurement records: simulation, filtering, "
               "smoothing and probe retrodiction"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool needs_record) {
    sub->add_option("--config", opt.config_path, "JSON experiment config");
    sub->add_option("--out", opt.out_dir, "output directory")
        ->capture_default_str();
    if (needs_record) {
      sub->add_option("--record", opt.record_path, "detector record CSV");
      sub->add_option("--outcomes", opt.outcomes_path,
                      "revealed intervention outcomes JSON");
    }
  };

  auto* sim = app.add_subcommand("simulate", "sample trajectories and records");
  add_common(sim, false);
  sim->add_option("--seed", [&opt](const std::vector<std::string>& v) {
    opt.seed = std::stoull(v.back());
    return true;
  }, "override the config seed");
  sim->add_option("--ensemble", [&opt](const std::vector<std::string>& v) {
    opt.ensemble = std::stoi(v.back());
    return true;
  }, "override the ensemble size");

  auto* fil = app.add_subcommand("filter", "condition on a detector record");
  add_common(fil, true);
  auto* smo = app.add_subcommand("smooth", "forward-backward pass over a record");
  add_common(smo, true);
  auto* ret = app.add_subcommand("retrodict",
                                 "posterior over probe outcomes from a record");
  add_common(ret, true);
  auto* ver = app.add_subcommand("verify", "run the built-in correctness checks");
  ver->add_option("--out", opt.out_dir, "output directory")
      ->capture_default_str();
  ver->add_option("--check", opt.checks, "run only these check numbers (1-9)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(opt);
    if (fil->parsed()) return cmd_filter(opt);
    if (smo->parsed()) return cmd_smooth(opt);
    if (ret->parsed()) return cmd_retrodict(opt);
    if (ver->parsed()) return cmd_verify(opt);
  } catch (const ParseError& e) {
    write_error(opt, "parse", e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    write_error(opt, "validation", e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    write_error(opt, "dimension", e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    write_error(opt, "runtime", e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
