// Copyright 2026 The HyFL-Sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Quick self-checks behind `hyfl verify`: each property is checked against
// a small plaintext oracle in a few seconds. The full suites live in the
// unit tests and the acceptance binary.

#pragma once

#include <string>
#include <vector>

namespace hyfl::cli {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> RunVerification(uint64_t seed = 1);

}  // namespace hyfl::cli
