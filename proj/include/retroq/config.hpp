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

#include "retroq/io.hpp"
#include "retroq/model.hpp"

namespace retroq {

struct NamedObservable {
  std::string name;
  CMatrix matrix;
};

/// Everything a run needs, as loaded from a JSON config file. Intervention
/// times are snapped onto the dt grid at load time, with a warning per
/// adjusted value.
struct RunConfig {
  ExperimentSpec experiment;
  std::vector<NamedObservable> observables;
  int ensemble = 1;
  std::string time_unit;
  std::vector<std::string> warnings;
};

/// Parse and structurally validate a config file. Throws ParseError for
/// malformed input and ValidationError when the experiment fails validate().
RunConfig load_config(const std::string& path);

/// Same, from an already parsed document.
RunConfig config_from_json(const json& j);

/// Normalized config document (snapped times included); loading it back
/// reproduces the RunConfig exactly.
json config_to_json(const RunConfig& config);

}  // namespace retroq
