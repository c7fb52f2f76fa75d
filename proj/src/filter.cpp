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

#include "retroq/filter.hpp"

#include <cmath>

#include "retroq/errors.hpp"

namespace retroq {

namespace {

long step_of(double t, double dt) {
  return dt > 0.0 ? std::lround(t / dt) : 0;
}

void check_finite(const CMatrix& rho, double t, double dt, const char* who) {
  if (!rho.allFinite()) {
    throw PropagationError(std::string(who) + ": state left the finite range",
                           step_of(t, dt));
  }
}

}  // namespace

CMatrix drift_matrix(const OpenSystemModel& model) {
  CMatrix k = complexd(0.0, -1.0) * model.hamiltonian;
  for (const auto& l : model.couplings) {
    k -= 0.5 * (l.adjoint() * l);
  }
  return k;
}

CMatrix dissipator(const OpenSystemModel& model, const CMatrix& rho) {
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& l : model.couplings) {
    const CMatrix ld_l = l.adjoint() * l;
    out += l * rho * l.adjoint() - 0.5 * (ld_l * rho + rho * ld_l);
  }
  return out;
}

Eigen::VectorXd signal_rates(const OpenSystemModel& model, const CMatrix& rho) {
  Eigen::VectorXd rates(model.n_channels());
  for (Eigen::Index k = 0; k < model.n_channels(); ++k) {
    const auto& l = model.couplings[k];
    const complexd lam = trace_of_product(rho, l) + trace_of_product(rho, CMatrix(l.adjoint()));
    rates(k) = std::sqrt(model.efficiencies[k]) * lam.real();
  }
  return rates;
}

CMatrix step_factor(const OpenSystemModel& model,
                    const Eigen::Ref<const Eigen::VectorXd>& dY, double dt) {
  if (dY.size() != model.n_channels()) {
    throw DimensionError("step_factor: one increment per channel required");
  }
  CMatrix g = CMatrix::Identity(model.dim, model.dim) + dt * drift_matrix(model);
  for (Eigen::Index k = 0; k < model.n_channels(); ++k) {
    g += std::sqrt(model.efficiencies[k]) * dY(k) * model.couplings[k];
  }
  return g;
}

std::vector<CMatrix> residual_ops(const OpenSystemModel& model, double dt) {
  std::vector<CMatrix> out;
  for (Eigen::Index k = 0; k < model.n_channels(); ++k) {
    const double miss = 1.0 - model.efficiencies[k];
    if (miss > 0.0) {
      out.push_back(std::sqrt(miss * dt) * model.couplings[k]);
    }
  }
  return out;
}

CMatrix propagate_density(const CMatrix& rho, const CMatrix& factor,
                          const std::vector<CMatrix>& residuals) {
  CMatrix out = factor * rho * factor.adjoint();
  for (const auto& r : residuals) {
    out += r * rho * r.adjoint();
  }
  return hermitize(out);
}

CMatrix propagate_effect(const CMatrix& effect, const CMatrix& factor,
                         const std::vector<CMatrix>& residuals) {
  CMatrix out = factor.adjoint() * effect * factor;
  for (const auto& r : residuals) {
    out += r.adjoint() * effect * r;
  }
  return hermitize(out);
}

FilterState filter_step(const FilterState& state,
                        const Eigen::Ref<const Eigen::VectorXd>& dY,
                        const OpenSystemModel& model, double dt) {
  const CMatrix g = step_factor(model, dY, dt);
  const CMatrix next = propagate_density(state.rho, g, residual_ops(model, dt));
  check_finite(next, state.t, dt, "filter_step");
  const double p = next.trace().real();
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw PropagationError("filter_step: nonpositive trace factor",
                           step_of(state.t, dt));
  }
  return FilterState{next / p, state.log_scale + std::log(p), state.t + dt};
}

FilterState zakai_step(const FilterState& state,
                       const Eigen::Ref<const Eigen::VectorXd>& dY,
                       const OpenSystemModel& model, double dt) {
  const CMatrix g = step_factor(model, dY, dt);
  CMatrix next = propagate_density(state.rho, g, residual_ops(model, dt));
  check_finite(next, state.t, dt, "zakai_step");
  double log_scale = state.log_scale;
  const double tr = next.trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr)) {
    throw PropagationError("zakai_step: state trace collapsed",
                           step_of(state.t, dt));
  }
  if (std::abs(std::log(tr)) > kLogRebalanceThreshold) {
    next /= tr;
    log_scale += std::log(tr);
  }
  return FilterState{std::move(next), log_scale, state.t + dt};
}

double log_likelihood(const FilterState& state) {
  const double tr = state.rho.trace().real();
  if (!(tr > 0.0)) {
    throw ZeroProbabilityError("log_likelihood: nonpositive state trace");
  }
  return state.log_scale + std::log(tr);
}

namespace {

std::vector<FilterState> run_conditional(
    const MeasurementRecord& record, const ExperimentSpec& spec,
    const std::vector<std::string>& revealed, bool normalized) {
  validate_or_throw(spec);
  if (record.n_channels() != spec.model.n_channels()) {
    throw DimensionError("run_filter: record channel count mismatch");
  }
  if (record.n_steps() != spec.n_steps() || record.dt <= 0.0) {
    throw DimensionError("run_filter: record grid does not match experiment");
  }
  if (!revealed.empty() && revealed.size() != spec.interventions.size()) {
    throw DimensionError(
        "run_filter: need one revealed outcome per intervention");
  }
  const double dt = record.dt;
  const auto n = record.n_steps();
  // Intervention lookup by grid step.
  std::vector<std::pair<Eigen::Index, std::size_t>> at_step;
  for (std::size_t i = 0; i < spec.interventions.size(); ++i) {
    at_step.emplace_back(spec.grid_step(spec.interventions[i]), i);
  }

  std::vector<FilterState> out;
  out.reserve(n + 1);
  out.push_back(FilterState{spec.initial_state, 0.0, 0.0});
  std::size_t next_iv = 0;
  FilterState cur = out.front();
  for (Eigen::Index i = 0; i <= n; ++i) {
    cur.t = static_cast<double>(i) * dt;
    while (next_iv < at_step.size() && at_step[next_iv].first == i) {
      const auto& iv = spec.interventions[at_step[next_iv].second];
      if (revealed.empty()) {
        cur.rho = marginal_update(iv, cur.rho);
      } else {
        const std::size_t m =
            outcome_index(iv, revealed[at_step[next_iv].second]);
        const CMatrix mapped = cp_map(iv, cur.rho, m);
        const double p = mapped.trace().real();
        const double ref = std::abs(cur.rho.trace().real());
        if (!(p > kZeroProbabilityTol * std::max(ref, 1e-300))) {
          throw ZeroProbabilityError(
              "run_filter: revealed outcome has probability " +
              std::to_string(p));
        }
        if (normalized) {
          cur.rho = mapped / p;
          cur.log_scale += std::log(p);
        } else {
          cur.rho = mapped;
        }
      }
      ++next_iv;
    }
    out[i] = cur;
    if (i == n) break;
    cur = normalized ? filter_step(cur, record.increments.col(i), spec.model, dt)
                     : zakai_step(cur, record.increments.col(i), spec.model, dt);
    out.push_back(cur);
  }
  return out;
}

}  // namespace

std::vector<FilterState> run_filter(
    const MeasurementRecord& record, const ExperimentSpec& spec,
    const std::vector<std::string>& revealed_outcomes) {
  return run_conditional(record, spec, revealed_outcomes, true);
}

std::vector<FilterState> run_zakai(
    const MeasurementRecord& record, const ExperimentSpec& spec,
    const std::vector<std::string>& revealed_outcomes) {
  return run_conditional(record, spec, revealed_outcomes, false);
}

}  // namespace retroq
