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

// The training loop.
//
// HyFL: the global committee G holds the model. Each round every cluster
// committee E_c receives a re-shared copy, its sampled clients secret-share
// their data into the cluster pool, E_c trains on the pool and re-shares the
// result to G, and G aggregates. Flat FL is the degenerate topology in
// which every client is its own one-member cluster and trains locally on
// the received model.
//
// With the shared backends the model never leaves secret-shared form. The
// only reveal of a full model goes to the out-of-band metrics sink.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyfl/core/config.h"
#include "hyfl/data/dataset.h"
#include "hyfl/mpc/sharing_engine.h"
#include "hyfl/nn/model.h"

namespace hyfl::core {

struct Cluster {
  mpc::PartySet committee;        // E_i
  std::vector<uint64_t> clients;  // P_i
};

struct Topology {
  Mode mode = Mode::kHyFL;
  mpc::PartySet global;  // G
  std::vector<Cluster> clusters;
  size_t sampled_per_cluster = 0;  // 0: flat FL samples across all clients
  // True when clients secret-share data into their cluster; false when each
  // client is its own committee and trains in the clear.
  bool data_shared = true;

  size_t num_clusters() const { return clusters.size(); }
};

// The topology `config` describes. Throws ConfigError for the hierarchical
// mode and inconsistent overrides.
Topology ConfigureAbstraction(const RunConfig& config);

// Contiguous client-id blocks of size total / clusters. These are the HyFL
// clusters, and in flat mode the groups attackers are placed into.
std::vector<std::vector<uint64_t>> PlacementGroups(const RunConfig& config);

struct RoundMetrics {
  int round = 0;
  double accuracy = 0.0;  // float evaluation of the revealed model
  std::string aggregator;
  std::string attack;
  double rate = 0.0;
  std::string placement;
  uint64_t bytes = 0;        // this round
  uint64_t comparisons = 0;  // this round, coordinate compare-exchanges
  std::vector<uint64_t> excluded_ids;
  uint64_t seed = 0;

  std::optional<double> fixed_accuracy;  // periodic fixed-point cross-check
  uint64_t comm_rounds = 0;
  uint64_t tally_comparisons = 0;
  uint64_t beaver_triples = 0;
  uint64_t aggregation_bytes = 0;   // spent inside the aggregator
  uint64_t aggregation_rounds = 0;
  std::vector<uint64_t> source_ids;   // aggregation inputs, ascending
  std::vector<double> trust_scores;   // FLTrust
  size_t excluded_malicious = 0;      // excluded sources that are attackers
};

struct TrainingResult {
  RunConfig config;
  nn::Architecture arch = nn::Architecture::Mlp();
  Topology topology;
  std::vector<RoundMetrics> metrics;
  std::vector<uint64_t> malicious;
  mpc::CostMeter::Totals totals;

  // Shared backends: the engine and the final model as shares at G.
  std::shared_ptr<mpc::SharingEngine> engine;
  std::optional<mpc::ShareSet> model_shares;
  // Float backend: the aggregator's plaintext model.
  std::optional<std::vector<double>> plain_model;

  // A copy of the final model for evaluation, revealed to the metrics sink.
  nn::Model RevealForMetrics() const;
};

struct Datasets {
  data::Dataset train;
  data::Dataset test;
};

// Loads the configured IDX files and applies the sample limits.
Datasets LoadDatasets(const RunConfig& config);

// Called after every round with the fresh record.
using RoundCallback = std::function<void(const RoundMetrics&)>;

TrainingResult RunTraining(const RunConfig& config, const Datasets& data,
                           const RoundCallback& on_round = {});
TrainingResult RunTraining(const RunConfig& config);

// Writes the final model: one checkpoint per member of G holding that
// member's shares ("final-G-<i>.ckpt"), or "final.ckpt" for the float
// backend. Returns the written paths.
std::vector<std::filesystem::path> WriteFinalModel(const TrainingResult& result,
                                                   const std::filesystem::path& dir);

// Private inference against the trained model held by cluster k. Queries
// are secret-shared to E_k, evaluated inside a prediction functionality and
// the scores are revealed to the querying client only.
class InferenceService {
 public:
  InferenceService(TrainingResult& result, int cluster);

  std::vector<int> Query(uint64_t client_id, const nn::Examples& queries);

 private:
  TrainingResult& result_;
  std::string committee_;
  Rng rng_;
  std::optional<mpc::ShareSet> model_;  // shared backends, at E_k
};

}  // namespace hyfl::core
