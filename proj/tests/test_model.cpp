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

#include <string>

#include "retroq/errors.hpp"
#include "retroq/model.hpp"
#include "retroq/trajectory.hpp"

using namespace retroq;

namespace {

// |+> on the system, CNOT coupling, probe read in the computational basis.
InterventionSpec cnot_probe() {
  InterventionSpec iv;
  iv.tau = 0.5;
  iv.probe_dim = 2;
  iv.probe_state = basis_projector(0, 2);
  CMatrix cnot = CMatrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  iv.coupling = cnot;
  iv.outcomes = {{"0", basis_projector(0, 2)}, {"1", basis_projector(1, 2)}};
  return iv;
}

ExperimentSpec qubit_spec() {
  ExperimentSpec spec;
  spec.model.dim = 2;
  spec.model.hamiltonian = CMatrix::Zero(2, 2);
  spec.model.couplings = {pauli_z()};
  spec.model.efficiencies = {1.0};
  CVector plus(2);
  plus << 1, 1;
  plus /= std::sqrt(2.0);
  spec.initial_state = projector(plus);
  spec.horizon = 1.0;
  spec.dt = 0.01;
  spec.seed = 5;
  spec.interventions = {cnot_probe()};
  return spec;
}

CMatrix random_density(RandomStream& rng, Eigen::Index d) {
  CMatrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      g(i, j) = complexd(rng.normal(), rng.normal());
    }
  }
  CMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

bool has_violation(const std::vector<Violation>& vs, const std::string& frag) {
  for (const auto& v : vs) {
    if (v.path.find(frag) != std::string::npos ||
        v.message.find(frag) != std::string::npos) {
      return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("validate accepts a well formed experiment") {
  const ExperimentSpec spec = qubit_spec();
  CHECK(validate(spec).empty());
  CHECK_NOTHROW(validate_or_throw(spec));
  CHECK(spec.n_steps() == 100);
  CHECK(spec.grid_step(spec.interventions[0]) == 50);
}

TEST_CASE("validate flags each broken field") {
  SUBCASE("non hermitian hamiltonian") {
    ExperimentSpec spec = qubit_spec();
    spec.model.hamiltonian(0, 1) = complexd(0, 1);
    CHECK(has_violation(validate(spec), "hamiltonian"));
  }
  SUBCASE("efficiency out of range") {
    ExperimentSpec spec = qubit_spec();
    spec.model.efficiencies = {1.2};
    CHECK(has_violation(validate(spec), "efficiencies"));
  }
  SUBCASE("coupling count mismatch") {
    ExperimentSpec spec = qubit_spec();
    spec.model.efficiencies = {1.0, 1.0};
    CHECK_FALSE(validate(spec).empty());
  }
  SUBCASE("initial state not a density matrix") {
    ExperimentSpec spec = qubit_spec();
    spec.initial_state = 2.0 * spec.initial_state;
    CHECK(has_violation(validate(spec), "initial_state"));
  }
  SUBCASE("negative dt") {
    ExperimentSpec spec = qubit_spec();
    spec.dt = -0.01;
    CHECK(has_violation(validate(spec), "dt"));
  }
  SUBCASE("tau off grid") {
    ExperimentSpec spec = qubit_spec();
    spec.interventions[0].tau = 0.5051;
    CHECK(has_violation(validate(spec), "tau"));
  }
  SUBCASE("tau outside the horizon") {
    ExperimentSpec spec = qubit_spec();
    spec.interventions[0].tau = 1.5;
    CHECK(has_violation(validate(spec), "tau"));
  }
  SUBCASE("non unitary coupling") {
    ExperimentSpec spec = qubit_spec();
    spec.interventions[0].coupling(0, 0) = 2.0;
    CHECK(has_violation(validate(spec), "coupling"));
  }
  SUBCASE("projectors that do not resolve the identity") {
    ExperimentSpec spec = qubit_spec();
    spec.interventions[0].outcomes.pop_back();
    CHECK(has_violation(validate(spec), "outcomes"));
  }
  SUBCASE("non idempotent projector") {
    ExperimentSpec spec = qubit_spec();
    spec.interventions[0].outcomes[0].projector = 0.5 * identity(2);
    spec.interventions[0].outcomes[1].projector = 0.5 * identity(2);
    CHECK(has_violation(validate(spec), "projector"));
  }
  SUBCASE("interventions out of time order") {
    ExperimentSpec spec = qubit_spec();
    InterventionSpec early = cnot_probe();
    early.tau = 0.25;
    spec.interventions.push_back(early);
    CHECK_FALSE(validate(spec).empty());
    CHECK_THROWS_AS(validate_or_throw(spec), ValidationError);
  }
}

TEST_CASE("cp_map outcomes sum to the non selective channel") {
  const InterventionSpec iv = cnot_probe();
  RandomStream rng(21, 0);
  const CMatrix rho = random_density(rng, 2);
  const CMatrix summed = cp_map(iv, rho, 0) + cp_map(iv, rho, 1);
  CHECK(frobenius_distance(summed, marginal_update(iv, rho)) < 1e-14);
  CHECK(outcome_probability(iv, rho, 0) + outcome_probability(iv, rho, 1) ==
        doctest::Approx(1.0));
}

TEST_CASE("cnot probe copies the computational populations") {
  const InterventionSpec iv = cnot_probe();
  CVector plus(2);
  plus << 1, 1;
  plus /= std::sqrt(2.0);
  const CMatrix rho = projector(plus);
  CHECK(outcome_probability(iv, rho, 0) == doctest::Approx(0.5));
  CHECK(outcome_probability(iv, rho, 1) == doctest::Approx(0.5));
  // Conditioning on "0" collapses the system onto |0><0|.
  const CMatrix post = conditioned_update(iv, rho, 0);
  CHECK(frobenius_distance(post, basis_projector(0, 2)) < 1e-14);
  // A concealed CNOT probe dephases the system in the computational basis.
  const CMatrix mixed = marginal_update(iv, rho);
  CHECK(std::abs(mixed(0, 1)) < 1e-14);
  CHECK(mixed(0, 0).real() == doctest::Approx(0.5));
}

TEST_CASE("conditioning on an impossible outcome throws") {
  const InterventionSpec iv = cnot_probe();
  const CMatrix rho = basis_projector(0, 2);
  CHECK_NOTHROW(conditioned_update(iv, rho, 0));
  CHECK_THROWS_AS(conditioned_update(iv, rho, 1), ZeroProbabilityError);
}

TEST_CASE("heisenberg maps are exact trace duals") {
  const InterventionSpec iv = cnot_probe();
  RandomStream rng(22, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix rho = random_density(rng, 2);
    CMatrix effect(2, 2);
    for (Eigen::Index i = 0; i < 2; ++i) {
      for (Eigen::Index j = 0; j < 2; ++j) {
        effect(i, j) = complexd(rng.normal(), rng.normal());
      }
    }
    effect = hermitize(effect);
    for (std::size_t m = 0; m < 2; ++m) {
      const complexd lhs = trace_of_product(cp_map(iv, rho, m), effect);
      const complexd rhs =
          trace_of_product(rho, heisenberg_cp_map(iv, effect, m));
      CHECK(std::abs(lhs - rhs) < 1e-13);
    }
    const complexd lhs = trace_of_product(marginal_update(iv, rho), effect);
    const complexd rhs =
        trace_of_product(rho, heisenberg_marginal(iv, effect));
    CHECK(std::abs(lhs - rhs) < 1e-13);
  }
}

TEST_CASE("heisenberg marginal is unital") {
  const InterventionSpec iv = cnot_probe();
  CHECK(frobenius_distance(heisenberg_marginal(iv, identity(2)), identity(2)) <
        1e-13);
}

TEST_CASE("probe state may be mixed") {
  InterventionSpec iv = cnot_probe();
  iv.probe_state = CMatrix::Zero(2, 2);
  iv.probe_state(0, 0) = 0.3;
  iv.probe_state(1, 1) = 0.7;
  const CMatrix rho = basis_projector(0, 2);
  // CNOT keeps the system in |0>, so the probe stays in its input mixture.
  CHECK(outcome_probability(iv, rho, 0) == doctest::Approx(0.3));
  CHECK(outcome_probability(iv, rho, 1) == doctest::Approx(0.7));
}

TEST_CASE("outcome_index finds labels and rejects unknowns") {
  const InterventionSpec iv = cnot_probe();
  CHECK(outcome_index(iv, "0") == 0);
  CHECK(outcome_index(iv, "1") == 1);
  CHECK_THROWS_AS(outcome_index(iv, "x"), std::invalid_argument);
}

TEST_CASE("cp_map rejects mismatched dimensions") {
  const InterventionSpec iv = cnot_probe();
  CHECK_THROWS_AS(cp_map(iv, identity(3), 0), DimensionError);
  CHECK_THROWS_AS(cp_map(iv, identity(2), 5), DimensionError);
}
