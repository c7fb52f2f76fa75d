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

// Runs the full verification battery and prints one line per check.
// Exits nonzero if any check fails.

#include <cstdio>
#include <exception>

#include "retroq/verify.hpp"

int main() {
  bool all_pass = true;
  for (int index = 1; index <= 9; ++index) {
    try {
      const retroq::CheckResult r = retroq::run_check(index);
      std::printf("%s\n", retroq::format_check(r).c_str());
      std::fflush(stdout);
      all_pass = all_pass && r.pass;
    } catch (const std::exception& e) {
      std::printf("C%d fail (exception: %s)\n", index, e.what());
      std::fflush(stdout);
      all_pass = false;
    }
  }
  std::printf(all_pass ? "acceptance: all checks passed\n"
                       : "acceptance: FAILURES above\n");
  return all_pass ? 0 : 1;
}
