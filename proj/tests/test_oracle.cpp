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

#include <cmath>

#include "retroq/errors.hpp"
#include "retroq/filter.hpp"
#include "retroq/oracle.hpp"

using namespace retroq;

namespace {

OpenSystemModel qubit_model() {
  OpenSystemModel model;
  model.dim = 2;
  model.hamiltonian = 0.3 * pauli_x();
  model.couplings = {pauli_z()};
  model.efficiencies = {1.0};
  return model;
}

CMatrix plus_density() {
  CVector v(2);
  v << 1, 1;
  v /= std::sqrt(2.0);
  return projector(v);
}

InterventionSite cnot_site(Eigen::Index step, double dt) {
  InterventionSpec iv;
  iv.tau = static_cast<double>(step) * dt;
  iv.probe_dim = 2;
  iv.probe_state = basis_projector(0, 2);
  CMatrix cnot = CMatrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  iv.coupling = cnot;
  iv.outcomes = {{"0", basis_projector(0, 2)}, {"1", basis_projector(1, 2)}};
  return {step, iv};
}

}  // namespace

TEST_CASE("collision model assembles a unitary chain") {
  const double dt = 0.05;
  const DiscreteModel dm = make_collision_model(qubit_model(), plus_density(),
                                                dt, 3);
  CHECK(dm.ancilla_dim == 2);
  CHECK(dm.step_outcomes.size() == 2);
  CHECK(dm.step_outcomes[0].label == "+");
  CHECK(dm.step_outcomes[1].label == "-");
  CHECK(dm.outcome_signals[0](0) == doctest::Approx(std::sqrt(dt)));
  CHECK(dm.outcome_signals[1](0) == doctest::Approx(-std::sqrt(dt)));
  CHECK(unitarity_defect(dm.step_unitary) < 1e-12);
  CHECK(unitarity_defect(global_unitary(dm)) < 1e-11);

  // The no-flip block of the collision reproduces 1 + K dt. The ancilla is
  // the fast index of system (x) ancilla, so the block sits at even strides.
  CMatrix block(2, 2);
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      block(i, j) = dm.step_unitary(2 * i, 2 * j);
    }
  }
  block -= identity(2) + dt * drift_matrix(qubit_model());
  CHECK(block.norm() < 10.0 * dt * dt);

  OpenSystemModel leaky = qubit_model();
  leaky.efficiencies = {0.5};
  CHECK_THROWS_AS(make_collision_model(leaky, plus_density(), dt, 3),
                  std::invalid_argument);
}

TEST_CASE("step kraus operators are complete") {
  const DiscreteModel dm = make_collision_model(qubit_model(), plus_density(),
                                                0.05, 3);
  const auto kraus = step_kraus(dm);
  REQUIRE(kraus.size() == 2);
  CMatrix sum = CMatrix::Zero(2, 2);
  for (const auto& k : kraus) sum += k.adjoint() * k;
  CHECK(frobenius_distance(sum, identity(2)) < 1e-13);
}

TEST_CASE("record probabilities sum to one and match the kraus route") {
  const double dt = 0.05;
  DiscreteModel dm = make_collision_model(qubit_model(), plus_density(), dt, 3);
  const CMatrix global_state = build_global_state(dm);
  const auto kraus = step_kraus(dm);
  double total = 0.0;
  for (std::size_t flat = 0; flat < n_discrete_records(dm); ++flat) {
    const DiscreteRecord rec = decode_record(dm, flat);
    const double p = record_probability(dm, rec, global_state);
    total += p;
    // Stepwise product of outcome weights reproduces the global Born rule.
    CMatrix rho = dm.initial_state;
    double p_chain = 1.0;
    for (Eigen::Index i = 0; i < dm.n_steps; ++i) {
      const CMatrix next =
          kraus[rec.outcomes[i]] * rho * kraus[rec.outcomes[i]].adjoint();
      const double w = next.trace().real();
      p_chain *= w;
      rho = next / w;
    }
    CHECK(std::abs(p - p_chain) < 1e-12);
    CHECK(frobenius_distance(kraus_filter(dm, rec),
                             exact_conditional_state(dm, rec, global_state)) <
          1e-11);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("decode_record enumerates step zero outermost") {
  const DiscreteModel dm = make_collision_model(qubit_model(), plus_density(),
                                                0.05, 4);
  CHECK(n_discrete_records(dm) == 16);
  const DiscreteRecord rec = decode_record(dm, 5);
  CHECK(rec.outcomes == std::vector<std::size_t>{0, 1, 0, 1});
  CHECK_THROWS_AS(decode_record(dm, 16), DimensionError);
}

TEST_CASE("retrodiction through collision factors matches global conditioning") {
  const double dt = 0.1;
  const DiscreteModel dm = make_collision_model(
      qubit_model(), plus_density(), dt, 4, {cnot_site(2, dt)});
  const CMatrix global_state = build_global_state(dm);
  for (std::size_t flat = 0; flat < n_discrete_records(dm); ++flat) {
    const DiscreteRecord rec = decode_record(dm, flat);
    if (record_probability(dm, rec, global_state) < 1e-14) continue;
    const auto exact =
        exact_conditional_probabilities(dm, rec, global_state);
    const auto seq = collision_propagators(dm, rec);
    const auto retro =
        retrodict_from_propagators(dm.initial_state, seq, dm.interventions);
    REQUIRE(exact.size() == retro.probabilities.size());
    for (std::size_t i = 0; i < exact.size(); ++i) {
      CHECK(std::abs(exact[i] - retro.probabilities[i]) < 1e-10);
    }
  }
}

TEST_CASE("record observables commute with the probe observables") {
  const double dt = 0.1;
  const DiscreteModel dm = make_collision_model(
      qubit_model(), plus_density(), dt, 3, {cnot_site(1, dt)});
  CHECK(check_commutation(dm) < 1e-12);
}

TEST_CASE("sampling is deterministic and follows positive weights") {
  const double dt = 0.05;
  const DiscreteModel dm = make_collision_model(
      qubit_model(), plus_density(), dt, 4, {cnot_site(2, dt)});
  RandomStream a(123, 0);
  RandomStream b(123, 0);
  const DiscreteRecord ra = sample_discrete_record(dm, a);
  const DiscreteRecord rb = sample_discrete_record(dm, b);
  CHECK(ra.outcomes == rb.outcomes);
  CHECK(ra.intervention_outcomes == rb.intervention_outcomes);
  REQUIRE(ra.intervention_outcomes.size() == 1);
  CHECK(record_probability(dm, ra) > 0.0);
  // The sampled state is consistent between the global and stepwise routes.
  CHECK(frobenius_distance(exact_conditional_state(dm, ra),
                           kraus_filter(dm, ra)) < 1e-11);
}

TEST_CASE("discrete records replay through the continuous filter") {
  const double dt = 1e-3;
  const DiscreteModel dm = make_collision_model(qubit_model(), plus_density(),
                                                dt, 4);
  RandomStream rng(321, 0);
  const DiscreteRecord rec = sample_discrete_record(dm, rng);
  const MeasurementRecord mr = to_measurement_record(dm, rec);
  CHECK(mr.dt == dt);
  CHECK(mr.n_steps() == 4);
  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(std::abs(mr.increments(0, i)) == doctest::Approx(std::sqrt(dt)));
  }

  ExperimentSpec spec;
  spec.model = qubit_model();
  spec.initial_state = plus_density();
  spec.horizon = 4 * dt;
  spec.dt = dt;
  const auto states = run_filter(mr, spec);
  const CMatrix discrete = kraus_filter(dm, rec);
  CHECK(trace_distance(states.back().rho, discrete) < 1e-3);
}

TEST_CASE("two channel collisions keep the bookkeeping straight") {
  OpenSystemModel model;
  model.dim = 2;
  model.hamiltonian = 0.3 * pauli_x();
  model.couplings = {sigma_minus(), 0.5 * pauli_z()};
  model.efficiencies = {1.0, 1.0};
  const double dt = 0.05;
  const DiscreteModel dm =
      make_collision_model(model, basis_projector(1, 2), dt, 2);
  CHECK(dm.ancilla_dim == 4);
  REQUIRE(dm.step_outcomes.size() == 4);
  CHECK(dm.step_outcomes[0].label == "++");
  CHECK(dm.step_outcomes[1].label == "+-");
  CHECK(dm.step_outcomes[3].label == "--");
  CHECK(dm.outcome_signals[1](0) == doctest::Approx(std::sqrt(dt)));
  CHECK(dm.outcome_signals[1](1) == doctest::Approx(-std::sqrt(dt)));

  const auto kraus = step_kraus(dm);
  CMatrix sum = CMatrix::Zero(2, 2);
  for (const auto& k : kraus) sum += k.adjoint() * k;
  CHECK(frobenius_distance(sum, identity(2)) < 1e-13);

  const CMatrix global_state = build_global_state(dm);
  double total = 0.0;
  for (std::size_t flat = 0; flat < n_discrete_records(dm); ++flat) {
    const DiscreteRecord rec = decode_record(dm, flat);
    total += record_probability(dm, rec, global_state);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("the global construction refuses to outgrow the cap") {
  const DiscreteModel dm = make_collision_model(qubit_model(), plus_density(),
                                                0.01, 20);
  CHECK_THROWS_AS(build_global_state(dm), DimensionError);
  // Stepwise machinery still works far beyond the cap.
  const auto kraus = step_kraus(dm);
  CHECK(kraus.size() == 2);
}
