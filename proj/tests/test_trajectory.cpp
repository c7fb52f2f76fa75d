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

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "retroq/errors.hpp"
#include "retroq/trajectory.hpp"

using namespace retroq;

namespace {

ExperimentSpec qubit_spec(bool with_probe) {
  ExperimentSpec spec;
  spec.model.dim = 2;
  spec.model.hamiltonian = 0.2 * pauli_x();
  spec.model.couplings = {pauli_z()};
  spec.model.efficiencies = {1.0};
  CVector plus(2);
  plus << 1, 1;
  plus /= std::sqrt(2.0);
  spec.initial_state = projector(plus);
  spec.horizon = 0.5;
  spec.dt = 0.005;
  spec.seed = 314;
  if (with_probe) {
    InterventionSpec iv;
    iv.tau = 0.25;
    iv.probe_dim = 2;
    iv.probe_state = basis_projector(0, 2);
    CMatrix cnot = CMatrix::Zero(4, 4);
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
    iv.coupling = cnot;
    iv.outcomes = {{"0", basis_projector(0, 2)},
                   {"1", basis_projector(1, 2)}};
    spec.interventions = {iv};
  }
  return spec;
}

}  // namespace

TEST_CASE("random streams are deterministic and index separated") {
  RandomStream a(99, 3);
  RandomStream b(99, 3);
  RandomStream c(99, 4);
  bool all_equal = true;
  bool any_differ = false;
  for (int i = 0; i < 64; ++i) {
    const double va = a.normal();
    all_equal = all_equal && (va == b.normal());
    any_differ = any_differ || (va != c.normal());
  }
  CHECK(all_equal);
  CHECK(any_differ);
  RandomStream u(5, 0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform01();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("gaussian increments have variance dt") {
  RandomStream rng(2024, 0);
  const double dt = 0.01;
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.gaussian_increment(dt);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 5.0 * std::sqrt(dt / n));
  CHECK(var == doctest::Approx(dt).epsilon(0.05));
}

TEST_CASE("simulate reproduces bitwise for equal seeds") {
  const ExperimentSpec spec = qubit_spec(true);
  const TrajectoryResult r1 = simulate(spec);
  const TrajectoryResult r2 = simulate(spec);
  CHECK((r1.record.increments - r2.record.increments).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK(r1.intervention_outcomes == r2.intervention_outcomes);
  CHECK(frobenius_distance(r1.final_state(), r2.final_state()) == 0.0);

  SimulateOptions other;
  other.trajectory_index = 1;
  const TrajectoryResult r3 = simulate(spec, other);
  CHECK((r1.record.increments - r3.record.increments).cwiseAbs().maxCoeff() >
        0.0);
}

TEST_CASE("record geometry matches the experiment grid") {
  const ExperimentSpec spec = qubit_spec(false);
  const TrajectoryResult r = simulate(spec);
  CHECK(r.record.n_channels() == 1);
  CHECK(r.record.n_steps() == spec.n_steps());
  CHECK(r.record.horizon() == doctest::Approx(spec.horizon));
  CHECK(r.intervention_outcomes.empty());
  CHECK(r.states.size() == 1);
}

TEST_CASE("stored states stay physical along the trajectory") {
  ExperimentSpec spec = qubit_spec(true);
  spec.model.efficiencies = {0.7};
  SimulateOptions opt;
  opt.store_states = true;
  const TrajectoryResult r = simulate(spec, opt);
  REQUIRE(static_cast<Eigen::Index>(r.states.size()) == spec.n_steps() + 1);
  for (const CMatrix& rho : r.states) {
    CHECK(rho.trace().real() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(hermiticity_defect(rho) < 1e-12);
    CHECK(min_eigenvalue(rho) > -1e-9);
  }
}

TEST_CASE("probe outcomes follow the born weights") {
  ExperimentSpec spec = qubit_spec(true);
  spec.model.hamiltonian = CMatrix::Zero(2, 2);
  int ones = 0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    SimulateOptions opt;
    opt.trajectory_index = static_cast<std::uint64_t>(i);
    const TrajectoryResult r = simulate(spec, opt);
    REQUIRE(r.intervention_outcomes.size() == 1);
    ones += (r.intervention_outcomes[0] == "1") ? 1 : 0;
  }
  // Dephasing keeps the populations at 1/2 each; 200 draws stay well
  // within five sigma of the mean.
  CHECK(ones > n / 2 - 35);
  CHECK(ones < n / 2 + 35);
}

TEST_CASE("simulate validates its input") {
  ExperimentSpec spec = qubit_spec(false);
  spec.dt = -1.0;
  CHECK_THROWS_AS(simulate(spec), ValidationError);
}

TEST_CASE("parallel_for covers every index once and forwards exceptions") {
  const Eigen::Index n = 1000;
  std::vector<std::atomic<int>> hits(n);
  for (auto& h : hits) h.store(0);
  parallel_for(n, [&](Eigen::Index i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) CHECK(h.load() == 1);

  CHECK_THROWS_AS(
      parallel_for(8,
                   [](Eigen::Index i) {
                     if (i == 3) throw std::runtime_error("boom");
                   }),
      std::runtime_error);
}
