# Copyright 2026 The Retroq Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math
from pathlib import Path

import numpy as np
import pytest

import retroq

REPO_ROOT = Path(__file__).resolve().parents[2]

SZ = np.diag([1.0, -1.0]).astype(complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def qubit_spec(with_probe=True):
    spec = retroq.ExperimentSpec()
    spec.model.dim = 2
    spec.model.hamiltonian = np.zeros((2, 2), dtype=complex)
    spec.model.couplings = [SZ]
    spec.model.efficiencies = [1.0]
    spec.initial_state = np.full((2, 2), 0.5, dtype=complex)
    spec.horizon = 0.5
    spec.dt = 0.005
    spec.seed = 21
    if with_probe:
        iv = retroq.InterventionSpec()
        iv.tau = 0.25
        iv.probe_dim = 2
        iv.probe_state = np.diag([1.0, 0.0]).astype(complex)
        iv.coupling = CNOT
        iv.outcomes = [
            retroq.OutcomeSpec("0", np.diag([1.0, 0.0]).astype(complex)),
            retroq.OutcomeSpec("1", np.diag([0.0, 1.0]).astype(complex)),
        ]
        spec.interventions = [iv]
    return spec


def test_validate_reports_problems():
    spec = qubit_spec(with_probe=False)
    assert retroq.validate(spec) == []
    spec.model.efficiencies = [1.5]
    violations = retroq.validate(spec)
    assert len(violations) == 1
    assert "efficiencies" in violations[0].path


def test_simulate_and_filter_roundtrip():
    spec = qubit_spec()
    traj = retroq.simulate(spec, store_states=True)
    assert traj.record.increments.shape == (1, spec.n_steps)
    assert traj.intervention_outcomes[0] in ("0", "1")
    assert len(traj.states) == spec.n_steps + 1

    states = retroq.run_filter(
        traj.record, spec, revealed_outcomes=traj.intervention_outcomes
    )
    assert len(states) == spec.n_steps + 1
    final = states[-1].rho
    assert final.trace().real == pytest.approx(1.0, abs=1e-9)
    assert np.max(np.abs(final - traj.states[-1])) < 1e-9
    assert math.isfinite(retroq.log_likelihood(states[-1]))


def test_retrodiction_is_a_distribution():
    spec = qubit_spec()
    traj = retroq.simulate(spec)
    retro = retroq.retrodict_single(traj.record, spec)
    assert retro.taus == [0.25]
    assert sorted(label for (label,) in retro.outcome_labels) == ["0", "1"]
    assert all(p >= 0.0 for p in retro.probabilities)
    assert sum(retro.probabilities) == pytest.approx(1.0, abs=1e-12)

    multi = retroq.retrodict_multi(traj.record, spec)
    assert multi.probabilities == pytest.approx(retro.probabilities, abs=1e-10)

    # The sampled hidden outcome should be the likelier one for a strong
    # dephasing record with a copying probe.
    best = max(zip(retro.probabilities, retro.outcome_labels))[1][0]
    assert best == traj.intervention_outcomes[0]


def test_past_state_pair_weight_is_time_invariant():
    spec = qubit_spec()
    traj = retroq.simulate(spec)
    weights = [
        retroq.log_pair_weight(retroq.past_state_pair(traj.record, spec, t))
        for t in (0.0, 0.1, 0.25, 0.5)
    ]
    assert max(weights) - min(weights) < 1e-9


def test_record_csv_roundtrip(tmp_path):
    spec = qubit_spec(with_probe=False)
    traj = retroq.simulate(spec)
    path = tmp_path / "record.csv"
    retroq.write_record_csv(str(path), traj.record)
    back = retroq.read_record_csv(str(path))
    assert back.dt == traj.record.dt
    assert np.array_equal(back.increments, traj.record.increments)


def test_load_config_ships_with_the_repo():
    config = retroq.load_config(str(REPO_ROOT / "configs" / "qubit_cnot.json"))
    assert config.experiment.model.dim == 2
    assert config.experiment.n_steps == 100
    assert [o.name for o in config.observables] == ["x", "z"]
    assert config.warnings == []


def test_errors_surface_as_python_exceptions():
    spec = qubit_spec(with_probe=False)
    spec.dt = -1.0
    with pytest.raises(retroq.ValidationError):
        retroq.simulate(spec)
    with pytest.raises(retroq.ParseError):
        retroq.load_config("does_not_exist.json")


def test_builtin_check_runs_green():
    result = retroq.run_check(1)
    assert result.passed
    assert result.id == "C1"
    assert "C1" in retroq.format_check(result)
