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

#pragma once

#include <vector>

#include "retroq/model.hpp"
#include "retroq/trajectory.hpp"

namespace retroq {

/// Rebalance an unnormalized state once |log tr rho| exceeds this.
inline constexpr double kLogRebalanceThreshold = 30.0;

/// Conditional state (normalized) or likelihood-bearing state (unnormalized)
/// together with the accumulated log of trace factors pulled out so far.
struct FilterState {
  CMatrix rho;
  double log_scale = 0.0;
  double t = 0.0;
};

/// K = -iH - 1/2 sum_k L_k^dag L_k, the no-signal drift generator.
CMatrix drift_matrix(const OpenSystemModel& model);

/// sum_k ( L_k rho L_k^dag - 1/2 {L_k^dag L_k, rho} ).
CMatrix dissipator(const OpenSystemModel& model, const CMatrix& rho);

/// Per channel signal rate sqrt(eta_k) tr{rho (L_k + L_k^dag)} for unit
/// trace rho. The innovation of a step is dY_k - rate_k * dt.
Eigen::VectorXd signal_rates(const OpenSystemModel& model, const CMatrix& rho);

/// One-step propagation factor
///   G = 1 + sum_k sqrt(eta_k) L_k dY_k + K dt.
/// A single step acts as rho -> G rho G^dag + sum_k (1 - eta_k) L_k rho
/// L_k^dag dt, which agrees with the Euler update of the conditional master
/// equation to O(dt^{3/2}) and keeps the state positive exactly.
CMatrix step_factor(const OpenSystemModel& model,
                    const Eigen::Ref<const Eigen::VectorXd>& dY, double dt);

/// sqrt((1 - eta_k) dt) L_k for the channels with eta_k < 1. These carry the
/// undetected share of each channel through a propagation step.
std::vector<CMatrix> residual_ops(const OpenSystemModel& model, double dt);

/// G rho G^dag + sum_r R_r rho R_r^dag, Hermitized.
CMatrix propagate_density(const CMatrix& rho, const CMatrix& factor,
                          const std::vector<CMatrix>& residuals);

/// G^dag E G + sum_r R_r^dag E R_r, Hermitized. Trace dual of
/// propagate_density: tr{propagate_density(rho) E} = tr{rho
/// propagate_effect(E)} for all rho, E.
CMatrix propagate_effect(const CMatrix& effect, const CMatrix& factor,
                         const std::vector<CMatrix>& residuals);

/// Normalized conditional step. log_scale accumulates the log of the trace
/// factor of every step, so it carries the record log likelihood.
FilterState filter_step(const FilterState& state,
                        const Eigen::Ref<const Eigen::VectorXd>& dY,
                        const OpenSystemModel& model, double dt);

/// Linear (unnormalized) step of the same record. The trace of rho times
/// exp(log_scale) is the record likelihood density. Rebalances the stored
/// scale when the trace drifts past kLogRebalanceThreshold in log magnitude.
FilterState zakai_step(const FilterState& state,
                       const Eigen::Ref<const Eigen::VectorXd>& dY,
                       const OpenSystemModel& model, double dt);

/// log of the likelihood carried by a (possibly unnormalized) state.
double log_likelihood(const FilterState& state);

/// Run the normalized filter over a full record. Returns N + 1 states, entry
/// j holding the conditional state at t_j = j dt. At intervention times the
/// probe update is applied first, so entry j reflects every update up to and
/// including t_j. revealed_outcomes holds one label per intervention in spec
/// order; pass an empty vector to treat all interventions as concealed
/// (non-selective marginal channel).
std::vector<FilterState> run_filter(
    const MeasurementRecord& record, const ExperimentSpec& spec,
    const std::vector<std::string>& revealed_outcomes = {});

/// Same traversal with zakai_step; final state carries the record likelihood.
std::vector<FilterState> run_zakai(
    const MeasurementRecord& record, const ExperimentSpec& spec,
    const std::vector<std::string>& revealed_outcomes = {});

}  // namespace retroq
