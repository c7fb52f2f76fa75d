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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "retroq/config.hpp"
#include "retroq/errors.hpp"
#include "retroq/filter.hpp"
#include "retroq/io.hpp"
#include "retroq/model.hpp"
#include "retroq/oracle.hpp"
#include "retroq/smoother.hpp"
#include "retroq/trajectory.hpp"
#include "retroq/verify.hpp"

namespace py = pybind11;
using namespace retroq;

PYBIND11_MODULE(_retroq, m) {
  m.doc() = "Diffusive quantum trajectory filtering, retrodiction and "
            "past-state smoothing";

  py::register_exception<DimensionError>(m, "DimensionError",
                                         PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError",
                                          PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ZeroProbabilityError>(m, "ZeroProbabilityError",
                                               PyExc_RuntimeError);
  py::register_exception<PropagationError>(m, "PropagationError",
                                           PyExc_RuntimeError);

  py::class_<OpenSystemModel>(m, "OpenSystemModel")
      .def(py::init<>())
      .def_readwrite("dim", &OpenSystemModel::dim)
      .def_readwrite("hamiltonian", &OpenSystemModel::hamiltonian)
      .def_readwrite("couplings", &OpenSystemModel::couplings)
      .def_readwrite("efficiencies", &OpenSystemModel::efficiencies)
      .def_property_readonly("n_channels", &OpenSystemModel::n_channels);

  py::class_<OutcomeSpec>(m, "OutcomeSpec")
      .def(py::init<>())
      .def(py::init([](std::string label, CMatrix projector) {
             return OutcomeSpec{std::move(label), std::move(projector)};
           }),
           py::arg("label"), py::arg("projector"))
      .def_readwrite("label", &OutcomeSpec::label)
      .def_readwrite("projector", &OutcomeSpec::projector);

  py::class_<InterventionSpec>(m, "InterventionSpec")
      .def(py::init<>())
      .def_readwrite("tau", &InterventionSpec::tau)
      .def_readwrite("probe_dim", &InterventionSpec::probe_dim)
      .def_readwrite("probe_state", &InterventionSpec::probe_state)
      .def_readwrite("coupling", &InterventionSpec::coupling)
      .def_readwrite("outcomes", &InterventionSpec::outcomes);

  py::class_<ExperimentSpec>(m, "ExperimentSpec")
      .def(py::init<>())
      .def_readwrite("model", &ExperimentSpec::model)
      .def_readwrite("initial_state", &ExperimentSpec::initial_state)
      .def_readwrite("horizon", &ExperimentSpec::horizon)
      .def_readwrite("dt", &ExperimentSpec::dt)
      .def_readwrite("seed", &ExperimentSpec::seed)
      .def_readwrite("interventions", &ExperimentSpec::interventions)
      .def_property_readonly("n_steps", &ExperimentSpec::n_steps);

  py::class_<Violation>(m, "Violation")
      .def_readonly("path", &Violation::path)
      .def_readonly("message", &Violation::message)
      .def("__repr__", [](const Violation& v) {
        return "Violation(" + v.path + ": " + v.message + ")";
      });

  py::class_<MeasurementRecord>(m, "MeasurementRecord")
      .def(py::init<>())
      .def(py::init([](double dt, Eigen::MatrixXd increments) {
             return MeasurementRecord{dt, std::move(increments)};
           }),
           py::arg("dt"), py::arg("increments"))
      .def_readwrite("dt", &MeasurementRecord::dt)
      .def_readwrite("increments", &MeasurementRecord::increments)
      .def_property_readonly("n_channels", &MeasurementRecord::n_channels)
      .def_property_readonly("n_steps", &MeasurementRecord::n_steps)
      .def_property_readonly("horizon", &MeasurementRecord::horizon);

  py::class_<TrajectoryResult>(m, "TrajectoryResult")
      .def_readonly("record", &TrajectoryResult::record)
      .def_readonly("intervention_outcomes",
                    &TrajectoryResult::intervention_outcomes)
      .def_readonly("states", &TrajectoryResult::states)
      .def_property_readonly("final_state", &TrajectoryResult::final_state);

  py::class_<FilterState>(m, "FilterState")
      .def_readonly("rho", &FilterState::rho)
      .def_readonly("log_scale", &FilterState::log_scale)
      .def_readonly("t", &FilterState::t);

  py::class_<RetrodictionResult>(m, "RetrodictionResult")
      .def_readonly("taus", &RetrodictionResult::taus)
      .def_readonly("outcome_labels", &RetrodictionResult::outcome_labels)
      .def_readonly("probabilities", &RetrodictionResult::probabilities)
      .def_readonly("normalizer", &RetrodictionResult::normalizer)
      .def_readonly("log_scale", &RetrodictionResult::log_scale);

  py::class_<PastStatePair>(m, "PastStatePair")
      .def_readonly("state", &PastStatePair::state)
      .def_readonly("effect", &PastStatePair::effect)
      .def_readonly("effect_log_scale", &PastStatePair::effect_log_scale);

  py::class_<EffectTrajectory>(m, "EffectTrajectory")
      .def_readonly("dt", &EffectTrajectory::dt)
      .def_readonly("effects", &EffectTrajectory::effects);

  py::class_<NamedObservable>(m, "NamedObservable")
      .def_readonly("name", &NamedObservable::name)
      .def_readonly("matrix", &NamedObservable::matrix);

  py::class_<RunConfig>(m, "RunConfig")
      .def_readonly("experiment", &RunConfig::experiment)
      .def_readonly("observables", &RunConfig::observables)
      .def_readonly("ensemble", &RunConfig::ensemble)
      .def_readonly("time_unit", &RunConfig::time_unit)
      .def_readonly("warnings", &RunConfig::warnings);

  py::class_<CheckResult>(m, "CheckResult")
      .def_readonly("id", &CheckResult::id)
      .def_readonly("description", &CheckResult::description)
      .def_readonly("passed", &CheckResult::pass)
      .def_readonly("measured", &CheckResult::measured)
      .def_readonly("threshold", &CheckResult::threshold)
      .def_readonly("compare", &CheckResult::compare)
      .def_readonly("runtime_seconds", &CheckResult::runtime_seconds)
      .def_readonly("detail", &CheckResult::detail)
      .def("__repr__", [](const CheckResult& r) { return format_check(r); });

  m.def("validate", &validate, py::arg("spec"),
        "Structural validation; returns a list of violations");
  m.def(
      "simulate",
      [](const ExperimentSpec& spec, std::uint64_t trajectory_index,
         bool store_states) {
        SimulateOptions opt;
        opt.trajectory_index = trajectory_index;
        opt.store_states = store_states;
        return simulate(spec, opt);
      },
      py::arg("spec"), py::arg("trajectory_index") = 0,
      py::arg("store_states") = false,
      py::call_guard<py::gil_scoped_release>());
  m.def("run_filter", &run_filter, py::arg("record"), py::arg("spec"),
        py::arg("revealed_outcomes") = std::vector<std::string>{},
        py::call_guard<py::gil_scoped_release>());
  m.def("run_zakai", &run_zakai, py::arg("record"), py::arg("spec"),
        py::arg("revealed_outcomes") = std::vector<std::string>{},
        py::call_guard<py::gil_scoped_release>());
  m.def("log_likelihood", &log_likelihood, py::arg("state"));
  m.def("retrodict_single", &retrodict_single, py::arg("record"),
        py::arg("spec"), py::call_guard<py::gil_scoped_release>());
  m.def("retrodict_multi", &retrodict_multi, py::arg("record"),
        py::arg("spec"), py::call_guard<py::gil_scoped_release>());
  m.def("past_state_pair", &past_state_pair, py::arg("record"),
        py::arg("spec"), py::arg("t"),
        py::arg("revealed") = std::vector<std::string>{},
        py::call_guard<py::gil_scoped_release>());
  m.def("past_state_series", &past_state_series, py::arg("record"),
        py::arg("spec"), py::arg("revealed") = std::vector<std::string>{},
        py::call_guard<py::gil_scoped_release>());
  m.def("log_pair_weight", &log_pair_weight, py::arg("pair"));
  m.def("pair_outcome_distribution", &pair_outcome_distribution,
        py::arg("pair"), py::arg("probe"));
  m.def("backward_effects", &backward_effects, py::arg("record"),
        py::arg("model"), py::call_guard<py::gil_scoped_release>());
  m.def("forward_propagator", &forward_propagator, py::arg("record"),
        py::arg("model"), py::arg("t1"), py::arg("t2"));

  m.def("load_config", &load_config, py::arg("path"));
  m.def("read_record_csv", &read_record_csv, py::arg("path"));
  m.def("write_record_csv", &write_record_csv, py::arg("path"),
        py::arg("record"));

  m.def("run_check", &run_check, py::arg("index"),
        py::call_guard<py::gil_scoped_release>(),
        "Run one of the built-in end-to-end checks (1 through 9)");
  m.def("run_verification", &run_verification,
        py::call_guard<py::gil_scoped_release>(),
        "Run the full check battery");
  m.def("format_check", &format_check, py::arg("result"));
}
