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

// Run configuration: a flat "key = value" document with dotted keys.
//
// Unset keys take the full-scale defaults; learning rate, batch size and
// the trim threshold depend on the mode (flat FL vs HyFL). ToText() emits
// every key, and parsing that text yields an identical RunConfig.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "hyfl/agg/aggregators.h"
#include "hyfl/attacks/attacks.h"
#include "hyfl/mpc/cost_meter.h"
#include "hyfl/nn/trainer.h"

namespace hyfl::core {

enum class Mode { kHyFL, kFlatSingle, kFlatMulti, kHierarchical };

// float: plaintext doubles everywhere. fixed: secret shares on the
// simulation engine with fixed-point training. multiparty: the same on the
// message-passing engine.
enum class ExperimentBackend { kFloat, kFixed, kMultiParty };

// Whether robust aggregators see model deltas (w_i - M) or raw parameters.
enum class AggTarget { kDelta, kRaw };

std::string_view ToString(Mode mode);
std::string_view ToString(ExperimentBackend backend);
std::string_view ToString(AggTarget target);
Mode ParseMode(std::string_view name);

struct DataPaths {
  std::string train_images = "data/mnist-desk/train-images-idx3-ubyte";
  std::string train_labels = "data/mnist-desk/train-labels-idx1-ubyte";
  std::string test_images = "data/mnist-desk/t10k-images-idx3-ubyte";
  std::string test_labels = "data/mnist-desk/t10k-labels-idx1-ubyte";
  size_t train_limit = 0;  // 0: all
  size_t test_limit = 0;
  friend bool operator==(const DataPaths&, const DataPaths&) = default;
};

struct RunConfig {
  Mode mode = Mode::kHyFL;
  ExperimentBackend backend = ExperimentBackend::kFloat;
  int rounds = 2000;
  uint64_t seed = 1;
  std::string arch = "lenet";  // "lenet", "mlp" or a descriptor
  DataPaths data;

  size_t total_clients = 1000;
  size_t clients_per_round = 100;   // flat modes
  size_t shard_size = 200;
  size_t clusters = 10;             // HyFL, and attacker placement groups
  size_t sampled_per_cluster = 10;  // HyFL
  int committee_size = 2;           // |E_i|
  int global_size = 2;              // |G|
  size_t pool_cap = 0;              // samples per cluster pool, 0: unbounded

  nn::TrainSpec train;
  agg::AggregatorSpec agg;
  AggTarget agg_target = AggTarget::kDelta;
  size_t root_size = 200;

  attacks::AttackSpec attack;
  mpc::CostModel cost;

  int fixed_check_every = 10;
  bool parallel = false;

  friend bool operator==(const RunConfig&, const RunConfig&);
};

// Full-scale defaults for `mode`.
RunConfig DefaultConfig(Mode mode);

// Parses the document. Throws ConfigError naming the key on unknown keys,
// malformed values and violated constraints.
RunConfig ParseConfig(std::string_view text);
RunConfig LoadConfig(const std::filesystem::path& path);
// Applies "key=value" overrides on top of every key of `base`, then
// validates.
RunConfig ApplyOverrides(const RunConfig& base, const std::map<std::string, std::string>& kv);

std::string ToText(const RunConfig& config);

// Throws ConfigError on violated constraints.
void Validate(const RunConfig& config);

// Number of inputs the aggregator sees per round.
size_t AggregationInputs(const RunConfig& config);

}  // namespace hyfl::core
