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

#include <string>
#include <vector>

#include "retroq/filter.hpp"
#include "retroq/model.hpp"
#include "retroq/trajectory.hpp"

namespace retroq {

/// Record-conditioned propagation factors of a trajectory: one factor per
/// step plus the step residual operators of imperfectly detected channels.
/// A step acts as rho -> F rho F^dag + sum_r R_r rho R_r^dag; the adjoint
/// action on effects is the exact trace dual.
struct PropagatorSequence {
  double dt = 0.0;
  std::vector<CMatrix> factors;
  std::vector<CMatrix> residuals;

  Eigen::Index n_steps() const {
    return static_cast<Eigen::Index>(factors.size());
  }
};

PropagatorSequence make_propagators(const MeasurementRecord& record,
                                    const OpenSystemModel& model);

/// Time ordered product of step factors over [t1, t2] (grid times). For a
/// perfectly detected record this is the conditional evolution operator F
/// with psi -> F psi / norm.
CMatrix forward_propagator(const MeasurementRecord& record,
                           const OpenSystemModel& model, double t1, double t2);

/// One backward step of the effect operator: the trace dual of the forward
/// density step for the same increment.
CMatrix backward_effect_step(const CMatrix& effect,
                             const Eigen::Ref<const Eigen::VectorXd>& dY,
                             const OpenSystemModel& model, double dt);

/// E(T, t_j) for every grid point, E(T, T) = 1. Probe interventions are not
/// part of this sweep; see past_state_series for records with probes.
struct EffectTrajectory {
  double dt = 0.0;
  std::vector<CMatrix> effects;
};

EffectTrajectory backward_effects(const MeasurementRecord& record,
                                  const OpenSystemModel& model);

/// Retrodicted distribution over probe outcomes given a full record.
/// outcome_labels[i] lists one label per intervention (time order);
/// probabilities[i] is the corresponding posterior weight, normalized to 1.
/// normalizer * exp(log_scale) is the unnormalized record weight that the
/// posterior was divided by.
struct RetrodictionResult {
  std::vector<double> taus;
  std::vector<std::vector<std::string>> outcome_labels;
  std::vector<double> probabilities;
  double normalizer = 0.0;
  double log_scale = 0.0;
};

/// A probe site on the step grid: the probe acts right before the step
/// factor of the given index.
struct InterventionSite {
  Eigen::Index step = 0;
  InterventionSpec spec;
};

/// Core retrodiction over explicit propagation factors. Shared by the
/// continuous-record entry points and by discrete collision model checks.
RetrodictionResult retrodict_from_propagators(
    const CMatrix& rho0, const PropagatorSequence& seq,
    const std::vector<InterventionSite>& sites);

/// Posterior over the outcomes of the single intervention in spec, computed
/// from the forward likelihood state and the backward effect at tau.
RetrodictionResult retrodict_single(const MeasurementRecord& record,
                                    const ExperimentSpec& spec);

/// Joint posterior over the outcome tuples of all interventions in spec.
RetrodictionResult retrodict_multi(const MeasurementRecord& record,
                                   const ExperimentSpec& spec);

/// Unnormalized forward state and backward effect meeting at time t. The
/// state includes every update up to and including t, the effect everything
/// after t, so tr{rho E} e^{log scales} is the record weight, independent
/// of t. revealed_outcomes as in run_filter; concealed interventions enter
/// through the non-selective channel on either side.
struct PastStatePair {
  FilterState state;
  CMatrix effect;
  double effect_log_scale = 0.0;
};

PastStatePair past_state_pair(const MeasurementRecord& record,
                              const ExperimentSpec& spec, double t,
                              const std::vector<std::string>& revealed = {});

std::vector<PastStatePair> past_state_series(
    const MeasurementRecord& record, const ExperimentSpec& spec,
    const std::vector<std::string>& revealed = {});

/// log of the record weight carried by a pair.
double log_pair_weight(const PastStatePair& pair);

/// Posterior the pair assigns to the outcomes of a hypothetical probe at its
/// meeting time.
std::vector<double> pair_outcome_distribution(const PastStatePair& pair,
                                              const InterventionSpec& probe);

}  // namespace retroq
