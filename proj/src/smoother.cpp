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

#include "retroq/smoother.hpp"

#include <cmath>
#include <functional>

#include "retroq/errors.hpp"

namespace retroq {

namespace {

// Rescale a working operator once its norm leaves a safe band, folding the
// factor into an accumulated log weight.
void rebalance(CMatrix& a, double& log_weight) {
  const double s = a.norm();
  if (!(s > 0.0) || !std::isfinite(s)) return;
  if (std::abs(std::log(s)) > kLogRebalanceThreshold) {
    a /= s;
    log_weight += std::log(s);
  }
}

// Pull an effect backward through factors [lo, hi), descending.
void pull_back(CMatrix& effect, const PropagatorSequence& seq, Eigen::Index lo,
               Eigen::Index hi, double& log_weight) {
  for (Eigen::Index i = hi - 1; i >= lo; --i) {
    effect = propagate_effect(effect, seq.factors[i], seq.residuals);
    rebalance(effect, log_weight);
  }
}

Eigen::Index checked_grid_step(const MeasurementRecord& record, double t,
                               const char* who) {
  const auto j = static_cast<Eigen::Index>(std::llround(t / record.dt));
  if (j < 0 || j > record.n_steps() ||
      std::abs(j * record.dt - t) > 1e-9 * std::max(1.0, std::abs(t))) {
    throw DimensionError(std::string(who) + ": time " + std::to_string(t) +
                         " is not on the record grid");
  }
  return j;
}

void check_record(const MeasurementRecord& record, const ExperimentSpec& spec,
                  const char* who) {
  if (record.n_channels() != spec.model.n_channels()) {
    throw DimensionError(std::string(who) + ": record channel count mismatch");
  }
  if (record.n_steps() != spec.n_steps() || record.dt <= 0.0) {
    throw DimensionError(std::string(who) +
                         ": record grid does not match experiment");
  }
}

std::vector<InterventionSite> sites_of(const ExperimentSpec& spec) {
  std::vector<InterventionSite> sites;
  for (const auto& iv : spec.interventions) {
    sites.push_back(InterventionSite{spec.grid_step(iv), iv});
  }
  return sites;
}

}  // namespace

PropagatorSequence make_propagators(const MeasurementRecord& record,
                                    const OpenSystemModel& model) {
  if (record.n_channels() != model.n_channels()) {
    throw DimensionError("make_propagators: record channel count mismatch");
  }
  PropagatorSequence seq;
  seq.dt = record.dt;
  seq.residuals = residual_ops(model, record.dt);
  seq.factors.reserve(record.n_steps());
  for (Eigen::Index i = 0; i < record.n_steps(); ++i) {
    seq.factors.push_back(step_factor(model, record.increments.col(i), record.dt));
  }
  return seq;
}

CMatrix forward_propagator(const MeasurementRecord& record,
                           const OpenSystemModel& model, double t1, double t2) {
  const auto j1 = checked_grid_step(record, t1, "forward_propagator");
  const auto j2 = checked_grid_step(record, t2, "forward_propagator");
  if (j1 > j2) {
    throw DimensionError("forward_propagator: requires t1 <= t2");
  }
  CMatrix f = CMatrix::Identity(model.dim, model.dim);
  for (Eigen::Index i = j1; i < j2; ++i) {
    f = step_factor(model, record.increments.col(i), record.dt) * f;
  }
  return f;
}

CMatrix backward_effect_step(const CMatrix& effect,
                             const Eigen::Ref<const Eigen::VectorXd>& dY,
                             const OpenSystemModel& model, double dt) {
  return propagate_effect(effect, step_factor(model, dY, dt),
                          residual_ops(model, dt));
}

EffectTrajectory backward_effects(const MeasurementRecord& record,
                                  const OpenSystemModel& model) {
  const auto n = record.n_steps();
  EffectTrajectory out;
  out.dt = record.dt;
  out.effects.assign(n + 1, CMatrix());
  out.effects[n] = CMatrix::Identity(model.dim, model.dim);
  const auto residuals = residual_ops(model, record.dt);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    out.effects[i] = propagate_effect(
        out.effects[i + 1],
        step_factor(model, record.increments.col(i), record.dt), residuals);
  }
  return out;
}

RetrodictionResult retrodict_from_propagators(
    const CMatrix& rho0, const PropagatorSequence& seq,
    const std::vector<InterventionSite>& sites) {
  if (sites.empty()) {
    throw DimensionError(
        "retrodict_from_propagators: at least one probe site required");
  }
  const auto n = seq.n_steps();
  const auto r = sites.size();
  for (std::size_t k = 0; k < r; ++k) {
    if (sites[k].step < 1 || sites[k].step > n - 1) {
      throw DimensionError("retrodict_from_propagators: site off the grid");
    }
    if (k > 0 && sites[k - 1].step >= sites[k].step) {
      throw DimensionError(
          "retrodict_from_propagators: sites must be strictly increasing");
    }
  }

  // Row-major tuple layout, first intervention outermost.
  std::vector<std::size_t> stride(r, 1);
  for (int k = static_cast<int>(r) - 2; k >= 0; --k) {
    stride[k] = stride[k + 1] * sites[k + 1].spec.outcomes.size();
  }
  const std::size_t n_tuples = stride[0] * sites[0].spec.outcomes.size();

  std::vector<double> values(n_tuples, 0.0);
  std::vector<double> logs(n_tuples, 0.0);

  // Backward over the record, branching at each probe site. The invariant
  // entering depth k is: effect pulled back to the boundary right above
  // site k, all later probes absorbed.
  std::function<void(int, CMatrix, double, std::size_t)> descend =
      [&](int k, CMatrix effect, double logw, std::size_t base) {
        const Eigen::Index hi = (k == static_cast<int>(r) - 1)
                                    ? n
                                    : sites[k + 1].step;
        pull_back(effect, seq, sites[k].step, hi, logw);
        const auto& iv = sites[k].spec;
        for (std::size_t m = 0; m < iv.outcomes.size(); ++m) {
          CMatrix branch = heisenberg_cp_map(iv, effect, m);
          double blog = logw;
          const std::size_t flat = base + m * stride[k];
          if (k == 0) {
            pull_back(branch, seq, 0, sites[0].step, blog);
            const double w = trace_of_product(rho0, branch).real();
            values[flat] = std::max(w, 0.0);
            logs[flat] = blog;
          } else {
            descend(k - 1, std::move(branch), blog, flat);
          }
        }
      };
  descend(static_cast<int>(r) - 1,
          CMatrix::Identity(rho0.rows(), rho0.cols()), 0.0, 0);

  // Combine branches under a common scale.
  double lmax = logs[0];
  for (double l : logs) lmax = std::max(lmax, l);
  double total = 0.0;
  std::vector<double> weights(n_tuples);
  for (std::size_t i = 0; i < n_tuples; ++i) {
    weights[i] = values[i] * std::exp(logs[i] - lmax);
    total += weights[i];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw ZeroProbabilityError(
        "retrodict_from_propagators: record has zero weight");
  }

  RetrodictionResult out;
  out.normalizer = total;
  out.log_scale = lmax;
  for (const auto& site : sites) {
    out.taus.push_back(static_cast<double>(site.step) * seq.dt);
  }
  out.outcome_labels.reserve(n_tuples);
  out.probabilities.reserve(n_tuples);
  for (std::size_t i = 0; i < n_tuples; ++i) {
    std::vector<std::string> labels(r);
    for (std::size_t k = 0; k < r; ++k) {
      const std::size_t m = (i / stride[k]) % sites[k].spec.outcomes.size();
      labels[k] = sites[k].spec.outcomes[m].label;
    }
    out.outcome_labels.push_back(std::move(labels));
    out.probabilities.push_back(weights[i] / total);
  }
  return out;
}

RetrodictionResult retrodict_single(const MeasurementRecord& record,
                                    const ExperimentSpec& spec) {
  validate_or_throw(spec);
  check_record(record, spec, "retrodict_single");
  if (spec.interventions.size() != 1) {
    throw DimensionError("retrodict_single: exactly one intervention required");
  }
  const auto& iv = spec.interventions[0];
  const auto s = spec.grid_step(iv);
  const auto seq = make_propagators(record, spec.model);

  // Forward likelihood state up to tau.
  CMatrix rho = spec.initial_state;
  double log_fwd = 0.0;
  for (Eigen::Index i = 0; i < s; ++i) {
    rho = propagate_density(rho, seq.factors[i], seq.residuals);
    rebalance(rho, log_fwd);
  }
  // Backward effect from the horizon down to tau.
  CMatrix effect = CMatrix::Identity(spec.model.dim, spec.model.dim);
  double log_bwd = 0.0;
  pull_back(effect, seq, s, seq.n_steps(), log_bwd);

  RetrodictionResult out;
  out.taus.push_back(static_cast<double>(s) * record.dt);
  out.log_scale = log_fwd + log_bwd;
  double total = 0.0;
  std::vector<double> weights;
  for (std::size_t m = 0; m < iv.outcomes.size(); ++m) {
    const double w =
        trace_of_product(cp_map(iv, rho, m), effect).real();
    weights.push_back(std::max(w, 0.0));
    total += weights.back();
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw ZeroProbabilityError("retrodict_single: record has zero weight");
  }
  out.normalizer = total;
  for (std::size_t m = 0; m < iv.outcomes.size(); ++m) {
    out.outcome_labels.push_back({iv.outcomes[m].label});
    out.probabilities.push_back(weights[m] / total);
  }
  return out;
}

RetrodictionResult retrodict_multi(const MeasurementRecord& record,
                                   const ExperimentSpec& spec) {
  validate_or_throw(spec);
  check_record(record, spec, "retrodict_multi");
  if (spec.interventions.empty()) {
    throw DimensionError("retrodict_multi: at least one intervention required");
  }
  return retrodict_from_propagators(
      spec.initial_state, make_propagators(record, spec.model), sites_of(spec));
}

PastStatePair past_state_pair(const MeasurementRecord& record,
                              const ExperimentSpec& spec, double t,
                              const std::vector<std::string>& revealed) {
  validate_or_throw(spec);
  check_record(record, spec, "past_state_pair");
  const auto j = checked_grid_step(record, t, "past_state_pair");
  const auto sites = sites_of(spec);
  const auto seq = make_propagators(record, spec.model);

  // Forward, probes at steps <= j included.
  FilterState state{spec.initial_state, 0.0, 0.0};
  std::size_t next_site = 0;
  for (Eigen::Index i = 0; i <= j; ++i) {
    while (next_site < sites.size() && sites[next_site].step == i) {
      const auto& iv = sites[next_site].spec;
      state.rho = revealed.empty()
                      ? marginal_update(iv, state.rho)
                      : cp_map(iv, state.rho,
                               outcome_index(iv, revealed[next_site]));
      ++next_site;
    }
    if (i == j) break;
    state.rho = propagate_density(state.rho, seq.factors[i], seq.residuals);
    rebalance(state.rho, state.log_scale);
  }
  state.t = static_cast<double>(j) * record.dt;

  // Backward, probes at steps > j absorbed on the effect side.
  CMatrix effect = CMatrix::Identity(spec.model.dim, spec.model.dim);
  double log_eff = 0.0;
  std::size_t k = sites.size();
  Eigen::Index upper = seq.n_steps();
  while (k > 0 && sites[k - 1].step > j) {
    const auto& site = sites[k - 1];
    pull_back(effect, seq, site.step, upper, log_eff);
    const auto& iv = site.spec;
    effect = revealed.empty()
                 ? heisenberg_marginal(iv, effect)
                 : heisenberg_cp_map(iv, effect,
                                     outcome_index(iv, revealed[k - 1]));
    upper = site.step;
    --k;
  }
  pull_back(effect, seq, j, upper, log_eff);

  return PastStatePair{std::move(state), std::move(effect), log_eff};
}

std::vector<PastStatePair> past_state_series(
    const MeasurementRecord& record, const ExperimentSpec& spec,
    const std::vector<std::string>& revealed) {
  validate_or_throw(spec);
  check_record(record, spec, "past_state_series");
  const auto n = record.n_steps();
  const auto sites = sites_of(spec);
  const auto seq = make_propagators(record, spec.model);

  const auto forward = run_zakai(record, spec, revealed);

  std::vector<CMatrix> effects(n + 1);
  std::vector<double> logs(n + 1, 0.0);
  effects[n] = CMatrix::Identity(spec.model.dim, spec.model.dim);
  std::size_t k = sites.size();
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    CMatrix cur = effects[i + 1];
    double logw = logs[i + 1];
    // A probe at t_{i+1} belongs to the future of t_i but to the past of
    // t_{i+1}, so it is absorbed when crossing below its time.
    while (k > 0 && sites[k - 1].step == i + 1) {
      const auto& iv = sites[k - 1].spec;
      cur = revealed.empty()
                ? heisenberg_marginal(iv, cur)
                : heisenberg_cp_map(iv, cur,
                                    outcome_index(iv, revealed[k - 1]));
      --k;
    }
    cur = propagate_effect(cur, seq.factors[i], seq.residuals);
    rebalance(cur, logw);
    effects[i] = std::move(cur);
    logs[i] = logw;
  }

  std::vector<PastStatePair> out;
  out.reserve(n + 1);
  for (Eigen::Index j = 0; j <= n; ++j) {
    out.push_back(PastStatePair{forward[j], effects[j], logs[j]});
  }
  return out;
}

double log_pair_weight(const PastStatePair& pair) {
  const double w = trace_of_product(pair.state.rho, pair.effect).real();
  if (!(w > 0.0)) {
    throw ZeroProbabilityError("log_pair_weight: nonpositive pair weight");
  }
  return std::log(w) + pair.state.log_scale + pair.effect_log_scale;
}

std::vector<double> pair_outcome_distribution(const PastStatePair& pair,
                                              const InterventionSpec& probe) {
  std::vector<double> weights;
  double total = 0.0;
  for (std::size_t m = 0; m < probe.outcomes.size(); ++m) {
    const double w =
        trace_of_product(cp_map(probe, pair.state.rho, m), pair.effect).real();
    weights.push_back(std::max(w, 0.0));
    total += weights.back();
  }
  if (!(total > 0.0)) {
    throw ZeroProbabilityError(
        "pair_outcome_distribution: record has zero weight");
  }
  for (auto& w : weights) w /= total;
  return weights;
}

}  // namespace retroq
