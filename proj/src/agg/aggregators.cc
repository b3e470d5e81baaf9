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

#include "hyfl/agg/aggregators.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "hyfl/common/error.h"
#include "hyfl/common/rng.h"

namespace hyfl::agg {
namespace {

template <class D>
void CheckUpdates(const D& d, const std::vector<typename D::Value>& updates) {
  HYFL_ENFORCE(!updates.empty(), Error, "aggregation needs at least one update");
  for (const auto& u : updates) {
    HYFL_ENFORCE(d.Size(u) == d.Size(updates[0]), ShapeError,
                 "update length " + std::to_string(d.Size(u)) + " differs from " +
                     std::to_string(d.Size(updates[0])));
  }
}

void CheckAlpha(size_t alpha, size_t m) {
  HYFL_ENFORCE(2 * alpha < m, Error,
               "2*alpha < m violated (alpha " + std::to_string(alpha) + ", m " +
                   std::to_string(m) + ")");
}

double Norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::string_view ToString(AggregatorKind kind) {
  switch (kind) {
    case AggregatorKind::kFedAvg: return "fedavg";
    case AggregatorKind::kTrimmedMean: return "tm";
    case AggregatorKind::kTmVariant: return "tm-variant";
    case AggregatorKind::kFlTrust: return "fltrust";
  }
  return "?";
}

AggregatorKind ParseAggregatorKind(std::string_view name) {
  for (AggregatorKind k : {AggregatorKind::kFedAvg, AggregatorKind::kTrimmedMean,
                           AggregatorKind::kTmVariant, AggregatorKind::kFlTrust}) {
    if (name == ToString(k)) return k;
  }
  throw ConfigError("agg.kind", "unknown aggregator '" + std::string(name) +
                                    "' (fedavg, tm, tm-variant, fltrust)");
}

std::vector<size_t> SampleCoordinates(size_t gamma, size_t beta, uint64_t seed) {
  HYFL_ENFORCE(beta >= 1 && beta <= gamma, Error,
               "sample size beta must lie in [1, " + std::to_string(gamma) + "]");
  Rng rng(seed);
  auto idx = rng.SampleWithoutReplacement(gamma, beta);
  std::sort(idx.begin(), idx.end());
  return idx;
}

template <class D>
typename D::Value FedAvg(D& d, const std::vector<typename D::Value>& updates,
                         const std::vector<double>& weights) {
  CheckUpdates(d, updates);
  const size_t m = updates.size();
  const bool uniform =
      weights.empty() || std::all_of(weights.begin(), weights.end(),
                                     [&](double w) { return w == weights[0]; });
  if (uniform) {
    HYFL_ENFORCE(weights.empty() || weights.size() == m, ShapeError,
                 "one weight per update expected");
    HYFL_ENFORCE(weights.empty() || weights[0] > 0, Error, "weights must sum to > 0");
    typename D::Value acc = updates[0];
    for (size_t i = 1; i < m; ++i) acc = d.Add(acc, updates[i]);
    return d.Scale(1.0 / static_cast<double>(m), acc);
  }
  HYFL_ENFORCE(weights.size() == m, ShapeError, "one weight per update expected");
  double total = 0.0;
  for (double w : weights) {
    HYFL_ENFORCE(w >= 0, Error, "weights must be non-negative");
    total += w;
  }
  HYFL_ENFORCE(total > 0, Error, "weights must sum to > 0");
  typename D::Value acc = d.Scale(weights[0] / total, updates[0]);
  for (size_t i = 1; i < m; ++i) acc = d.Add(acc, d.Scale(weights[i] / total, updates[i]));
  return acc;
}

template <class D>
typename D::Value TrimmedMean(D& d, const std::vector<typename D::Value>& updates,
                              size_t alpha, NetworkKind network) {
  CheckUpdates(d, updates);
  const size_t m = updates.size();
  CheckAlpha(alpha, m);
  std::vector<typename D::Value> v = updates;
  for (const Comparator& c : BuildSortingNetwork(m, network)) {
    d.CompareExchange(v[c.lo], v[c.hi], {}, {}, mpc::CompareKind::kCoordinate);
  }
  typename D::Value acc = v[alpha];
  for (size_t k = alpha + 1; k < m - alpha; ++k) acc = d.Add(acc, v[k]);
  return d.Scale(1.0 / static_cast<double>(m - 2 * alpha), acc);
}

template <class D>
AggregationOutput<D> TmVariant(D& d, const std::vector<typename D::Value>& updates,
                               const std::vector<uint64_t>& source_ids, size_t alpha,
                               size_t beta, uint64_t seed, NetworkKind network) {
  using V = typename D::Value;
  CheckUpdates(d, updates);
  const size_t m = updates.size();
  const size_t gamma = d.Size(updates[0]);
  CheckAlpha(alpha, m);
  HYFL_ENFORCE(source_ids.size() == m, ShapeError, "one source id per update expected");
  HYFL_ENFORCE(std::set<uint64_t>(source_ids.begin(), source_ids.end()).size() == m, Error,
               "source ids must be distinct");
  const std::vector<size_t> coords = SampleCoordinates(gamma, beta, seed);
  const std::vector<Comparator> net = BuildSortingNetwork(m, network);

  // TM-List: sort the sampled coordinates, carrying a one-hot tag of the
  // source along with every value.
  std::vector<V> vals;
  std::vector<std::vector<V>> tag(m);
  for (size_t j = 0; j < m; ++j) {
    vals.push_back(d.Slice(updates[j], coords));
    for (size_t k = 0; k < m; ++k) {
      tag[j].push_back(d.Constant(std::vector<double>(beta, j == k ? 1.0 : 0.0), true));
    }
  }
  std::vector<V*> lo_tag(m), hi_tag(m);
  for (const Comparator& c : net) {
    for (size_t k = 0; k < m; ++k) {
      lo_tag[k] = &tag[c.lo][k];
      hi_tag[k] = &tag[c.hi][k];
    }
    d.CompareExchange(vals[c.lo], vals[c.hi], lo_tag, hi_tag, mpc::CompareKind::kCoordinate);
  }

  // Occurrences of each source among the top and bottom alpha positions.
  std::vector<V> counts(m);
  for (size_t k = 0; k < m; ++k) {
    counts[k] = d.Constant({0.0}, true);
    for (size_t pos = 0; pos < m; ++pos) {
      if (pos < alpha || pos >= m - alpha) counts[k] = d.Add(counts[k], d.Sum(tag[pos][k]));
    }
  }

  // TopK-Hitter: sort count keys; equal counts rank the lower source id
  // as more frequent.
  std::vector<size_t> by_id(m);
  for (size_t k = 0; k < m; ++k) by_id[k] = k;
  std::sort(by_id.begin(), by_id.end(),
            [&](size_t a, size_t b) { return source_ids[a] < source_ids[b]; });
  std::vector<size_t> rank(m);
  for (size_t r = 0; r < m; ++r) rank[by_id[r]] = r;
  std::vector<V> keys(m);
  std::vector<std::vector<V>> who(m);
  for (size_t k = 0; k < m; ++k) {
    keys[k] = d.Add(d.ScaleInt(static_cast<int64_t>(m), counts[k]),
                    d.Constant({static_cast<double>(m - 1 - rank[k])}, true));
    for (size_t j = 0; j < m; ++j) who[k].push_back(d.Constant({j == k ? 1.0 : 0.0}, true));
  }
  for (const Comparator& c : net) {
    for (size_t j = 0; j < m; ++j) {
      lo_tag[j] = &who[c.lo][j];
      hi_tag[j] = &who[c.hi][j];
    }
    d.CompareExchange(keys[c.lo], keys[c.hi], lo_tag, hi_tag, mpc::CompareKind::kTally);
  }

  // The exclusion mask is opened to the aggregating committee; the benign
  // sum is then local.
  AggregationOutput<D> out;
  V acc;
  bool first = true;
  for (size_t j = 0; j < m; ++j) {
    V excluded = d.Constant({0.0}, true);
    for (size_t pos = m - 2 * alpha; pos < m; ++pos) excluded = d.Add(excluded, who[pos][j]);
    out.outlier_counts.push_back(d.ReportInteger(counts[j])[0]);
    if (d.OpenInteger(excluded)[0] != 0) {
      out.excluded_ids.push_back(source_ids[j]);
      continue;
    }
    acc = first ? updates[j] : d.Add(acc, updates[j]);
    first = false;
  }
  std::sort(out.excluded_ids.begin(), out.excluded_ids.end());
  out.update = d.Scale(1.0 / static_cast<double>(m - 2 * alpha), acc);
  return out;
}

FlTrustResult FlTrustCombine(const std::vector<double>& root,
                             const std::vector<std::vector<double>>& updates) {
  const double root_norm = Norm(root);
  HYFL_ENFORCE(root_norm > 0, Error, "FLTrust root update is zero");
  FlTrustResult out;
  out.output.assign(root.size(), 0.0);
  double total = 0.0;
  for (const auto& g : updates) {
    HYFL_ENFORCE(g.size() == root.size(), ShapeError, "update length differs from root");
    const double norm = Norm(g);
    double score = 0.0;
    if (norm > 0) {
      double dot = 0.0;
      for (size_t i = 0; i < g.size(); ++i) dot += g[i] * root[i];
      score = std::max(0.0, dot / (norm * root_norm));
    }
    out.scores.push_back(score);
    if (score > 0) {
      const double w = score * root_norm / norm;
      for (size_t i = 0; i < g.size(); ++i) out.output[i] += w * g[i];
      total += score;
    }
  }
  if (total > 0) {
    for (double& v : out.output) v /= total;
  }
  return out;
}

template <class D>
AggregationOutput<D> FlTrust(D& d, const std::vector<typename D::Value>& updates,
                             const typename D::Value& root_update) {
  CheckUpdates(d, updates);
  HYFL_ENFORCE(d.Size(root_update) == d.Size(updates[0]), ShapeError,
               "root update length differs from the updates");
  const size_t m = updates.size();
  const size_t gamma = d.Size(root_update);
  std::vector<std::vector<double>> plain;
  for (const auto& u : updates) plain.push_back(d.Open(u, "fltrust"));
  FlTrustResult r = FlTrustCombine(d.Open(root_update, "fltrust"), plain);
  // Dot products and norms, then the rescaled weighted sum; one square root
  // and one reciprocal per update plus the root norm.
  d.ChargeIdeal((2 * m + 1) * gamma + m * gamma, 2 * m + 1);
  AggregationOutput<D> out;
  out.update = d.FromPlain(std::move(r.output), "fltrust");
  out.trust_scores = std::move(r.scores);
  return out;
}

template <class D>
AggregationOutput<D> Aggregate(D& d, const AggregatorSpec& spec,
                               const AggregationInput<D>& input) {
  switch (spec.kind) {
    case AggregatorKind::kFedAvg: {
      AggregationOutput<D> out;
      out.update = FedAvg(d, input.updates, input.weights);
      return out;
    }
    case AggregatorKind::kTrimmedMean: {
      AggregationOutput<D> out;
      out.update = TrimmedMean(d, input.updates, spec.alpha, spec.network);
      return out;
    }
    case AggregatorKind::kTmVariant:
      return TmVariant(d, input.updates, input.source_ids, spec.alpha, spec.beta, input.seed,
                       spec.network);
    case AggregatorKind::kFlTrust:
      HYFL_ENFORCE(input.root_update != nullptr, Error, "FLTrust needs a root update");
      return FlTrust(d, input.updates, *input.root_update);
  }
  throw Error("unknown aggregator");
}

#define HYFL_INSTANTIATE(D)                                                             \
  template D::Value FedAvg<D>(D&, const std::vector<D::Value>&,                         \
                              const std::vector<double>&);                              \
  template D::Value TrimmedMean<D>(D&, const std::vector<D::Value>&, size_t,            \
                                   NetworkKind);                                        \
  template AggregationOutput<D> TmVariant<D>(D&, const std::vector<D::Value>&,          \
                                             const std::vector<uint64_t>&, size_t,      \
                                             size_t, uint64_t, NetworkKind);            \
  template AggregationOutput<D> FlTrust<D>(D&, const std::vector<D::Value>&,            \
                                           const D::Value&);                            \
  template AggregationOutput<D> Aggregate<D>(D&, const AggregatorSpec&,                 \
                                             const AggregationInput<D>&);

HYFL_INSTANTIATE(PlainDomain)
HYFL_INSTANTIATE(SharedDomain)

#undef HYFL_INSTANTIATE

}  // namespace hyfl::agg
