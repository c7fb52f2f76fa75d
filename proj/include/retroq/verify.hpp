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

namespace retroq {

/// Outcome of one end-to-end correctness check.
struct CheckResult {
  std::string id;
  std::string description;
  bool pass = false;
  /// Headline measurement; compare is "<=" or ">=" against threshold.
  double measured = 0.0;
  double threshold = 0.0;
  std::string compare = "<=";
  double runtime_seconds = 0.0;
  std::string detail;
};

/// Run check number `index` (1 through 9).
CheckResult run_check(int index);

/// All checks in order.
std::vector<CheckResult> run_verification();

/// "C3 pass measured=1.2e-12 threshold=1e-10 (34.1s): ..." style line.
std::string format_check(const CheckResult& r);

}  // namespace retroq
