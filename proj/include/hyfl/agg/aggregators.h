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

// Aggregation of m model updates of length gamma, written once over a value
// domain (see domain.h) and instantiated for PlainDomain and SharedDomain.
//
//   FedAvg       weighted mean; purely local (linear) in the shared domain.
//   TrimmedMean  per coordinate, sort the m values with an oblivious
//                network, drop alpha from each end, average the rest.
//   TmVariant    sample beta coordinates, collect the sources that land in
//                the top or bottom alpha of each, exclude the 2*alpha most
//                frequent sources entirely and average the others. Only the
//                exclusion set is opened, to the aggregating committee.
//   FlTrust      cosine trust against a server root update, with client
//                updates rescaled to the root update's norm.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hyfl/agg/domain.h"
#include "hyfl/agg/sorting_network.h"

namespace hyfl::agg {

enum class AggregatorKind { kFedAvg, kTrimmedMean, kTmVariant, kFlTrust };

std::string_view ToString(AggregatorKind kind);
AggregatorKind ParseAggregatorKind(std::string_view name);

struct AggregatorSpec {
  AggregatorKind kind = AggregatorKind::kFedAvg;
  size_t alpha = 2;    // trim threshold (TM and variant)
  size_t beta = 100;   // sampled coordinates (variant)
  NetworkKind network = NetworkKind::kMergeExchange;
};

template <class D>
struct AggregationInput {
  std::vector<typename D::Value> updates;
  std::vector<uint64_t> source_ids;  // one per update, distinct
  std::vector<double> weights;       // optional sample counts (FedAvg)
  const typename D::Value* root_update = nullptr;  // FLTrust only
  uint64_t seed = 0;                               // variant coordinate sample
};

template <class D>
struct AggregationOutput {
  typename D::Value update;
  std::vector<uint64_t> excluded_ids;   // variant, sorted
  std::vector<int64_t> outlier_counts;  // variant, per input
  std::vector<double> trust_scores;     // FLTrust, per input
};

// Unweighted mean when `weights` is empty or uniform.
template <class D>
typename D::Value FedAvg(D& d, const std::vector<typename D::Value>& updates,
                         const std::vector<double>& weights = {});

// Requires 2 * alpha < m.
template <class D>
typename D::Value TrimmedMean(D& d, const std::vector<typename D::Value>& updates,
                              size_t alpha, NetworkKind network = NetworkKind::kMergeExchange);

template <class D>
AggregationOutput<D> TmVariant(D& d, const std::vector<typename D::Value>& updates,
                               const std::vector<uint64_t>& source_ids, size_t alpha,
                               size_t beta, uint64_t seed,
                               NetworkKind network = NetworkKind::kMergeExchange);

template <class D>
AggregationOutput<D> FlTrust(D& d, const std::vector<typename D::Value>& updates,
                             const typename D::Value& root_update);

template <class D>
AggregationOutput<D> Aggregate(D& d, const AggregatorSpec& spec,
                               const AggregationInput<D>& input);

// Plain FLTrust rule. Scores are max(0, cos(root, g_i)) (0 for a zero
// update); the output is sum_i s_i * g_i * |root| / |g_i| divided by
// sum_i s_i, or all zeros when every score is 0. Throws Error on a zero
// root update.
struct FlTrustResult {
  std::vector<double> output;
  std::vector<double> scores;
};
FlTrustResult FlTrustCombine(const std::vector<double>& root,
                             const std::vector<std::vector<double>>& updates);

// Indices sampled by the variant: beta distinct coordinates of [0, gamma),
// ascending, deterministic in the seed.
std::vector<size_t> SampleCoordinates(size_t gamma, size_t beta, uint64_t seed);

}  // namespace hyfl::agg
