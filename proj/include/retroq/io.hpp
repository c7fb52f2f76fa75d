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

#include <nlohmann/json.hpp>

#include "retroq/linalg.hpp"
#include "retroq/smoother.hpp"
#include "retroq/trajectory.hpp"

namespace retroq {

using json = nlohmann::ordered_json;

/// Matrices travel as nested arrays of [re, im] pairs. Scalars parse as
/// real entries too.
json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j, const std::string& where);

/// Detector record as CSV with mandatory header t,dY_1,...,dY_n. Values are
/// written with full round trip precision; t is the start of each increment
/// interval.
void write_record_csv(const std::string& path, const MeasurementRecord& rec);
MeasurementRecord read_record_csv(const std::string& path);

/// Sampled intervention outcomes of one trajectory.
void write_outcomes_json(const std::string& path,
                         const std::vector<double>& taus,
                         const std::vector<std::string>& labels);
std::vector<std::string> read_outcomes_json(const std::string& path);

/// Observable expectations along the grid: header t,name_1,...,name_k.
void write_expectations_csv(const std::string& path,
                            const std::vector<std::string>& names,
                            double dt,
                            const std::vector<std::vector<double>>& rows);

json retrodiction_to_json(const RetrodictionResult& result);

void write_json(const std::string& path, const json& j);
json read_json(const std::string& path, const std::string& what);

}  // namespace retroq
