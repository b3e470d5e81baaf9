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

#include "hyfl/attacks/attacks.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <map>

#include "hyfl/common/error.h"

namespace hyfl::attacks {
namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// FNV-1a over the sample's feature bytes.
uint64_t ContentHash(const float* x, size_t n) {
  uint64_t h = 0xcbf29ce484222325ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(x);
  for (size_t i = 0; i < n * sizeof(float); ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string_view ToString(AttackKind kind) {
  switch (kind) {
    case AttackKind::kNone: return "none";
    case AttackKind::kRlf: return "rlf";
    case AttackKind::kSlf: return "slf";
    case AttackKind::kDlf: return "dlf";
    case AttackKind::kTlf: return "tlf";
  }
  return "?";
}

std::string_view ToString(Placement placement) {
  switch (placement) {
    case Placement::kEquallyDistributed: return "equally";
    case Placement::kFocused: return "focused";
    case Placement::kClusterFocused: return "cluster-focused";
  }
  return "?";
}

AttackKind ParseAttackKind(std::string_view name) {
  const std::string s = Lower(name);
  for (AttackKind k : {AttackKind::kNone, AttackKind::kRlf, AttackKind::kSlf,
                       AttackKind::kDlf, AttackKind::kTlf}) {
    if (s == ToString(k)) return k;
  }
  throw ConfigError("attack.kind", "unknown attack '" + std::string(name) +
                                       "' (none, rlf, slf, dlf, tlf)");
}

Placement ParsePlacement(std::string_view name) {
  const std::string s = Lower(name);
  if (s == "equally" || s == "equally-distributed") return Placement::kEquallyDistributed;
  if (s == "focused") return Placement::kFocused;
  if (s == "cluster-focused") return Placement::kClusterFocused;
  throw ConfigError("attack.placement", "unknown placement '" + std::string(name) +
                                            "' (equally, focused, cluster-focused)");
}

size_t MaliciousCount(double rate, size_t total_clients) {
  HYFL_ENFORCE(rate >= 0.0 && rate <= 1.0, Error, "poison rate must lie in [0, 1]");
  return static_cast<size_t>(std::llround(rate * static_cast<double>(total_clients)));
}

std::vector<uint64_t> SelectMalicious(const std::vector<std::vector<uint64_t>>& groups,
                                      double rate, Placement placement, Rng& rng) {
  size_t total = 0;
  for (const auto& g : groups) total += g.size();
  size_t remaining = MaliciousCount(rate, total);
  std::vector<uint64_t> out;
  if (placement == Placement::kEquallyDistributed) {
    std::vector<uint64_t> all;
    for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
    for (size_t i : rng.SampleWithoutReplacement(all.size(), remaining)) out.push_back(all[i]);
  } else {
    for (const auto& g : groups) {
      if (remaining == 0) break;
      const size_t room = placement == Placement::kFocused ? (g.size() + 1) / 2 - 1 : g.size();
      const size_t take = std::min(room, remaining);
      for (size_t i : rng.SampleWithoutReplacement(g.size(), take)) out.push_back(g[i]);
      remaining -= take;
    }
    HYFL_ENFORCE(remaining == 0, RuntimeFailure,
                 "focused placement cannot keep an honest majority in every cluster "
                 "at poison rate " + std::to_string(rate));
  }
  std::sort(out.begin(), out.end());
  return out;
}

void PoisonRlf(data::ClientShard& shard, const data::Dataset& data, int num_classes,
               uint64_t attack_seed) {
  HYFL_ENFORCE(num_classes >= 1, Error, "need at least one class");
  const uint64_t key = SplitMix64(attack_seed);
  for (size_t k = 0; k < shard.size(); ++k) {
    Rng draw(SplitMix64(ContentHash(data.sample(shard.indices[k]), data.sample_size()) ^ key));
    shard.labels[k] = static_cast<int>(draw.Below(static_cast<uint64_t>(num_classes)));
  }
  shard.poisoned = true;
}

void PoisonSlf(data::ClientShard& shard, int num_classes) {
  for (int& l : shard.labels) {
    HYFL_ENFORCE(l >= 0 && l < num_classes, Error, "label out of range");
    l = num_classes - l - 1;
  }
  shard.poisoned = true;
}

void PoisonTlf(data::ClientShard& shard, int source, int target) {
  HYFL_ENFORCE(source != target, Error, "targeted flip needs distinct source and target");
  for (int& l : shard.labels) {
    if (l == source) l = target;
  }
  shard.poisoned = true;
}

void PoisonDlf(const std::vector<data::ClientShard*>& shards, const data::Dataset& data,
               const nn::Architecture& arch, const nn::TrainSpec& surrogate,
               uint64_t attack_seed) {
  // Deduplicated union; the first holder's label is the training label.
  std::map<uint32_t, int> pooled;
  for (const auto* s : shards) {
    for (size_t k = 0; k < s->size(); ++k) pooled.emplace(s->indices[k], s->labels[k]);
  }
  HYFL_ENFORCE(!pooled.empty(), Error, "dynamic label flipping needs malicious data");

  nn::Examples train;
  train.sample_size = data.sample_size();
  for (const auto& [idx, label] : pooled) train.Add(data.sample(idx), label);

  Rng init(DeriveSeed(attack_seed, "surrogate-init"));
  nn::TrainSpec spec = surrogate;
  spec.seed = DeriveSeed(attack_seed, "surrogate-shuffle");
  nn::Model model = nn::Train(nn::Model::Initialize(arch, init), train, spec);

  std::map<uint32_t, int> flipped;
  for (const auto& [idx, label] : pooled) {
    const auto scores = nn::Predict(model, data.sample(idx));
    flipped[idx] = static_cast<int>(std::min_element(scores.begin(), scores.end()) -
                                    scores.begin());
  }
  for (auto* s : shards) {
    for (size_t k = 0; k < s->size(); ++k) s->labels[k] = flipped.at(s->indices[k]);
    s->poisoned = true;
  }
}

std::vector<uint64_t> ApplyAttack(const AttackSpec& spec,
                                  std::vector<data::ClientShard>& shards,
                                  const std::vector<std::vector<uint64_t>>& groups,
                                  const data::Dataset& data, const nn::Architecture& arch,
                                  uint64_t master_seed) {
  if (spec.kind == AttackKind::kNone || spec.poison_rate == 0.0) return {};
  Rng placement_rng(DeriveSeed(master_seed, "attack-placement"));
  const std::vector<uint64_t> malicious =
      SelectMalicious(groups, spec.poison_rate, spec.placement, placement_rng);
  const uint64_t attack_seed = DeriveSeed(master_seed, "attack");

  std::vector<data::ClientShard*> targets;
  for (uint64_t id : malicious) {
    HYFL_ENFORCE(id < shards.size() && shards[id].client_id == id, Error,
                 "malicious id " + std::to_string(id) + " has no shard");
    targets.push_back(&shards[id]);
  }
  const int classes = data.num_classes;
  switch (spec.kind) {
    case AttackKind::kRlf:
      for (auto* s : targets) PoisonRlf(*s, data, classes, attack_seed);
      break;
    case AttackKind::kSlf:
      for (auto* s : targets) PoisonSlf(*s, classes);
      break;
    case AttackKind::kTlf:
      for (auto* s : targets) PoisonTlf(*s, spec.tlf_source, spec.tlf_target);
      break;
    case AttackKind::kDlf:
      if (!targets.empty()) PoisonDlf(targets, data, arch, spec.dlf_surrogate, attack_seed);
      break;
    case AttackKind::kNone:
      break;
  }
  return malicious;
}

}  // namespace hyfl::attacks
