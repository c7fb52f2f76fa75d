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

#include <cstdint>
#include <string>
#include <vector>

#include "retroq/linalg.hpp"

namespace retroq {

/// Outcome probabilities below this fraction of the state trace are treated
/// as zero when conditioning.
inline constexpr double kZeroProbabilityTol = 1e-12;

/// Tolerance for structural checks (Hermiticity, unitarity, normalization).
inline constexpr double kValidationTol = 1e-10;

/// Continuously monitored open system: drift Hamiltonian, coupling operators
/// of the monitored channels, and per channel detection efficiencies.
struct OpenSystemModel {
  Eigen::Index dim = 0;
  CMatrix hamiltonian;
  std::vector<CMatrix> couplings;
  std::vector<double> efficiencies;

  Eigen::Index n_channels() const {
    return static_cast<Eigen::Index>(couplings.size());
  }
};

struct OutcomeSpec {
  std::string label;
  CMatrix projector;  // acts on the probe
};

/// Instantaneous probe interaction at time tau: couple a fresh probe in
/// probe_state through the unitary coupling (system (x) probe ordering) and
/// projectively read the probe in the given outcome basis.
struct InterventionSpec {
  double tau = 0.0;
  Eigen::Index probe_dim = 0;
  CMatrix probe_state;
  CMatrix coupling;
  std::vector<OutcomeSpec> outcomes;
};

struct ExperimentSpec {
  OpenSystemModel model;
  CMatrix initial_state;
  double horizon = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<InterventionSpec> interventions;

  Eigen::Index n_steps() const;
  /// Grid index of an intervention time (tau must sit on the grid).
  Eigen::Index grid_step(const InterventionSpec& iv) const;
};

struct Violation {
  std::string path;
  std::string message;
};

/// Structural validation of a full experiment description. Returns every
/// violation found; an empty result means the experiment is usable.
std::vector<Violation> validate(const ExperimentSpec& spec);

/// Throws ValidationError listing all violations if validate() is nonempty.
void validate_or_throw(const ExperimentSpec& spec);

/// The outcome map of the probe measurement,
///   Phi_m(rho) = tr_probe{ V (rho (x) rho_probe) V^dag (1 (x) P_m) }.
CMatrix cp_map(const InterventionSpec& iv, const CMatrix& rho, std::size_t m);

/// tr Phi_m(rho), clamped imaginary part discarded.
double outcome_probability(const InterventionSpec& iv, const CMatrix& rho,
                           std::size_t m);

/// Phi_m(rho) / tr Phi_m(rho). Throws ZeroProbabilityError when the outcome
/// probability is below kZeroProbabilityTol relative to tr rho.
CMatrix conditioned_update(const InterventionSpec& iv, const CMatrix& rho,
                           std::size_t m);

/// Sum over outcomes, i.e. the non-selective probe interaction.
CMatrix marginal_update(const InterventionSpec& iv, const CMatrix& rho);

/// Heisenberg dual of cp_map acting on effect operators,
///   tr{ Phi_m(rho) E } = tr{ rho Phi_m^dag(E) } for all rho, E.
CMatrix heisenberg_cp_map(const InterventionSpec& iv, const CMatrix& effect,
                          std::size_t m);

/// Heisenberg dual of marginal_update.
CMatrix heisenberg_marginal(const InterventionSpec& iv, const CMatrix& effect);

/// Index of the outcome with the given label; throws if absent.
std::size_t outcome_index(const InterventionSpec& iv, const std::string& label);

}  // namespace retroq
