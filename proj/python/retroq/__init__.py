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

"""Diffusive quantum trajectory filtering, retrodiction and smoothing."""

from ._retroq import (
    CheckResult,
    DimensionError,
    EffectTrajectory,
    ExperimentSpec,
    FilterState,
    InterventionSpec,
    MeasurementRecord,
    NamedObservable,
    OpenSystemModel,
    OutcomeSpec,
    ParseError,
    PastStatePair,
    PropagationError,
    RetrodictionResult,
    RunConfig,
    TrajectoryResult,
    ValidationError,
    Violation,
    ZeroProbabilityError,
    backward_effects,
    format_check,
    forward_propagator,
    load_config,
    log_likelihood,
    log_pair_weight,
    pair_outcome_distribution,
    past_state_pair,
    past_state_series,
    read_record_csv,
    retrodict_multi,
    retrodict_single,
    run_check,
    run_filter,
    run_verification,
    run_zakai,
    simulate,
    validate,
    write_record_csv,
)

__all__ = [
    "CheckResult",
    "DimensionError",
    "EffectTrajectory",
    "ExperimentSpec",
    "FilterState",
    "InterventionSpec",
    "MeasurementRecord",
    "NamedObservable",
    "OpenSystemModel",
    "OutcomeSpec",
    "ParseError",
    "PastStatePair",
    "PropagationError",
    "RetrodictionResult",
    "RunConfig",
    "TrajectoryResult",
    "ValidationError",
    "Violation",
    "ZeroProbabilityError",
    "backward_effects",
    "format_check",
    "forward_propagator",
    "load_config",
    "log_likelihood",
    "log_pair_weight",
    "pair_outcome_distribution",
    "past_state_pair",
    "past_state_series",
    "read_record_csv",
    "retrodict_multi",
    "retrodict_single",
    "run_check",
    "run_filter",
    "run_verification",
    "run_zakai",
    "simulate",
    "validate",
    "write_record_csv",
]
