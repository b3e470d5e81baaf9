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

#pragma once

#include <stdexcept>
#include <string>

namespace hyfl {

// Root of every error raised by the library. Callers that only need to
// distinguish "our" failures from std ones can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fixed-point value left the representable range of the 64-bit ring.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// Vector lengths, tensor shapes or precisions that do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Secret-sharing misuse: unknown committee, wrong owner, stale shares,
// exhausted dealer.
class SharingError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input files (IDX, checkpoints).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration. `key()` names the offending config key.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message)
      : Error(key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Experiment-level failures (diverged surrogate, infeasible placement...).
class RuntimeFailure : public Error {
 public:
  using Error::Error;
};

#define HYFL_ENFORCE(cond, ExcType, msg) \
  do {                                   \
    if (!(cond)) throw ExcType(msg);     \
  } while (0)

}  // namespace hyfl
