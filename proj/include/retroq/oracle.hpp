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

#include "retroq/model.hpp"
#include "retroq/smoother.hpp"
#include "retroq/trajectory.hpp"

namespace retroq {

/// Hard cap on the global Hilbert space dimension of the discrete oracle.
inline constexpr Eigen::Index kOracleDimCap = 16384;

/// Finitely many repeated system-ancilla collisions with a projective
/// readout of every ancilla. Small enough instances admit brute force
/// conditioning on the full record, which serves as ground truth for the
/// continuous machinery.
struct DiscreteModel {
  Eigen::Index system_dim = 0;
  Eigen::Index ancilla_dim = 0;
  Eigen::Index n_steps = 0;
  double dt = 0.0;
  CMatrix step_unitary;             // on system (x) ancilla
  CVector ancilla_init;             // fresh ancilla state before each step
  std::vector<OutcomeSpec> step_outcomes;  // readout projectors, ancilla side
  /// Detector increment attached to each step outcome (one entry per
  /// monitored channel). Empty when the model has no continuous reading.
  std::vector<Eigen::VectorXd> outcome_signals;
  CMatrix initial_state;            // system
  std::vector<InterventionSite> interventions;
};

struct DiscreteRecord {
  std::vector<std::size_t> outcomes;               // one per step
  std::vector<std::string> intervention_outcomes;  // empty means concealed
};

/// Discretize a continuously monitored model into collisions: each step
/// couples one fresh qubit per channel through
///   U = exp( sum_k sqrt(dt) (L_k (x) raise_k - L_k^dag (x) lower_k)
///            - i dt H (x) 1 )
/// and reads every qubit in the +/- basis, outcome s giving dY = s sqrt(dt).
/// Requires unit efficiency on every channel.
DiscreteModel make_collision_model(
    const OpenSystemModel& model, const CMatrix& rho0, double dt,
    Eigen::Index n_steps, std::vector<InterventionSite> interventions = {});

/// Slot layout [system, ancilla_0 .. ancilla_{n-1}, probe_0 .. probe_{r-1}].
HilbertFactorization global_factorization(const DiscreteModel& dm);

/// The full interaction chain on the global space, probes applied right
/// before the collision of their step.
CMatrix global_unitary(const DiscreteModel& dm);

/// Global state after the full chain, nothing measured yet.
CMatrix build_global_state(const DiscreteModel& dm);

/// Probability of the ancilla record (and of the revealed intervention
/// outcomes when present) under the global Born rule. The overloads taking
/// a precomputed global state let callers sweep many records without
/// rebuilding the chain.
double record_probability(const DiscreteModel& dm, const DiscreteRecord& rec);
double record_probability(const DiscreteModel& dm, const DiscreteRecord& rec,
                          const CMatrix& global_state);

/// Posterior over intervention outcome tuples given the ancilla record,
/// conditioning in the global space. Tuple layout is row-major with the
/// first intervention outermost, matching retrodict_from_propagators.
std::vector<double> exact_conditional_probabilities(const DiscreteModel& dm,
                                                    const DiscreteRecord& rec);
std::vector<double> exact_conditional_probabilities(
    const DiscreteModel& dm, const DiscreteRecord& rec,
    const CMatrix& global_state);

/// Reduced system state after conditioning on the full record; requires a
/// revealed outcome for every intervention.
CMatrix exact_conditional_state(const DiscreteModel& dm,
                                const DiscreteRecord& rec);
CMatrix exact_conditional_state(const DiscreteModel& dm,
                                const DiscreteRecord& rec,
                                const CMatrix& global_state);

/// Stepwise conditioning with the record Kraus operators and the probe
/// channels, never touching the global space.
CMatrix kraus_filter(const DiscreteModel& dm, const DiscreteRecord& rec);

/// The record-conditioned Kraus operator of each step outcome,
/// K_o = (1 (x) <phi_o|) U (1 (x) |ancilla_init>). Requires rank one
/// readout projectors.
std::vector<CMatrix> step_kraus(const DiscreteModel& dm);

/// The conditional factors of a specific record, for feeding the discrete
/// chain through the continuous retrodiction core.
PropagatorSequence collision_propagators(const DiscreteModel& dm,
                                         const DiscreteRecord& rec);

/// Matched continuous-record view of a discrete record; requires
/// outcome_signals.
MeasurementRecord to_measurement_record(const DiscreteModel& dm,
                                        const DiscreteRecord& rec);

/// Largest Frobenius norm among commutators of the chain-conjugated record
/// observables and probe observables, taken at their own interaction times.
/// Zero in exact arithmetic.
double check_commutation(const DiscreteModel& dm);

/// Sample a record (and intervention outcomes) by the global Born weights,
/// factored stepwise.
DiscreteRecord sample_discrete_record(const DiscreteModel& dm,
                                      RandomStream& rng);

/// Number of step-outcome tuples, i.e. step_outcomes.size()^n_steps.
std::size_t n_discrete_records(const DiscreteModel& dm);

/// Decode a flat record index (step 0 outermost) into a DiscreteRecord.
DiscreteRecord decode_record(const DiscreteModel& dm, std::size_t flat);

}  // namespace retroq
