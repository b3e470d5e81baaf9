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

// Label-flipping data poisoning by a single coordinated attacker.
//
// All malicious clients poison every sample they hold, once, before the
// first round. Coordination means a sample held by several malicious
// clients receives the same poisoned label everywhere.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hyfl/data/dataset.h"
#include "hyfl/nn/architecture.h"
#include "hyfl/nn/trainer.h"

namespace hyfl::attacks {

enum class AttackKind { kNone, kRlf, kSlf, kDlf, kTlf };
enum class Placement { kEquallyDistributed, kFocused, kClusterFocused };

std::string_view ToString(AttackKind kind);
std::string_view ToString(Placement placement);
// Accept the names printed by ToString (case-insensitive); throw ConfigError.
AttackKind ParseAttackKind(std::string_view name);
Placement ParsePlacement(std::string_view name);

// Surrogate training parameters for the dynamic attack.
inline nn::TrainSpec DefaultSurrogateSpec() {
  return nn::TrainSpec{50, 128, 0.05, 0.9, 0.0005, 1};
}

struct AttackSpec {
  AttackKind kind = AttackKind::kNone;
  double poison_rate = 0.0;
  Placement placement = Placement::kEquallyDistributed;
  int tlf_source = 0;
  int tlf_target = 1;
  nn::TrainSpec dlf_surrogate = DefaultSurrogateSpec();
};

// Number of malicious clients: round(rate * total).
size_t MaliciousCount(double rate, size_t total_clients);

// Picks the malicious clients. `groups` lists client ids per cluster in
// cluster order.
//   kEquallyDistributed: uniform over all clients.
//   kFocused: clusters are filled in order with at most ceil(size/2) - 1
//     malicious members each, keeping an honest majority everywhere.
//     Throws RuntimeFailure when the rate cannot be placed that way.
//   kClusterFocused: clusters are filled completely, in order.
// Members inside a partially filled cluster are drawn from `rng`. The result
// is sorted ascending.
std::vector<uint64_t> SelectMalicious(
    const std::vector<std::vector<uint64_t>>& groups, double rate,
    Placement placement, Rng& rng);

// Every label replaced by a uniform class. The draw for a sample is keyed
// on its content and the attacker seed, so duplicates agree.
void PoisonRlf(data::ClientShard& shard, const data::Dataset& data,
               int num_classes, uint64_t attack_seed);

// label -> num_classes - label - 1.
void PoisonSlf(data::ClientShard& shard, int num_classes);

// source -> target; every other label is left alone.
void PoisonTlf(data::ClientShard& shard, int source, int target);

// Trains one float surrogate of `arch` on the deduplicated union of the
// shards' samples (original labels), then relabels every sample with the
// surrogate's least probable class (lowest score, ties to the lowest index).
// Throws Error on empty input and RuntimeFailure if the surrogate diverges.
void PoisonDlf(const std::vector<data::ClientShard*>& shards,
               const data::Dataset& data, const nn::Architecture& arch,
               const nn::TrainSpec& surrogate, uint64_t attack_seed);

// Selects the malicious clients among `shards` (grouped by `groups`) and
// poisons their labels. Returns the malicious ids.
std::vector<uint64_t> ApplyAttack(const AttackSpec& spec,
                                  std::vector<data::ClientShard>& shards,
                                  const std::vector<std::vector<uint64_t>>& groups,
                                  const data::Dataset& data,
                                  const nn::Architecture& arch,
                                  uint64_t master_seed);

}  // namespace hyfl::attacks
