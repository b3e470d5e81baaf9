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

#include <filesystem>
#include <variant>
#include <vector>

#include "hyfl/common/rng.h"
#include "hyfl/nn/architecture.h"
#include "hyfl/ring/fixed_point.h"

namespace hyfl::nn {

enum class NumericBackend { kFloat, kFixed };

// Architecture plus a flat parameter vector, either float64 or fixed point.
class Model {
 public:
  Model(Architecture arch, std::vector<double> params);
  Model(Architecture arch, ring::FixedVec params);

  // He-style uniform initialization, U(-sqrt(6/fan_in), +sqrt(6/fan_in)) for
  // weights and zero biases, drawn in layer order from `rng`.
  static Model Initialize(const Architecture& arch, Rng& rng);
  static Model Zeros(const Architecture& arch,
                     NumericBackend backend = NumericBackend::kFloat);

  const Architecture& arch() const { return arch_; }
  NumericBackend backend() const;
  size_t param_count() const { return arch_.param_count(); }

  // Throw ShapeError if the model holds the other representation.
  const std::vector<double>& float_params() const;
  std::vector<double>& mutable_float_params();
  const ring::FixedVec& fixed_params() const;
  ring::FixedVec& mutable_fixed_params();

  Model ToFixed(int frac_bits = ring::kDefaultFracBits) const;
  Model ToFloat() const;
  // Parameters as doubles regardless of representation.
  std::vector<double> Decoded() const;

  friend bool operator==(const Model&, const Model&) = default;

 private:
  Architecture arch_;
  std::variant<std::vector<double>, ring::FixedVec> params_;
};

// Checkpoint: "HYFLCKPT", descriptor length and text, backend tag, fraction
// bits, count, then count little-endian 64-bit values (IEEE-754 bit
// patterns for float models, ring elements for fixed models).
void SaveCheckpoint(const Model& model, const std::filesystem::path& path);
Model LoadCheckpoint(const std::filesystem::path& path);

}  // namespace hyfl::nn
