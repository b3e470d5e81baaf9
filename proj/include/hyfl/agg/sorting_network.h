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

// Data-independent compare-exchange schedules. A schedule is computed once
// per input count and applied to every coordinate in parallel.

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace hyfl::agg {

// After the exchange, slot `lo` holds the smaller and `hi` the larger value.
struct Comparator {
  size_t lo;
  size_t hi;
  friend bool operator==(const Comparator&, const Comparator&) = default;
};

enum class NetworkKind {
  // Batcher's merge-exchange: 31 comparators for 10 inputs, 1077 for 100.
  kMergeExchange,
  // Recursive bitonic sort for arbitrary n (no padding).
  kBitonic,
};

std::string_view ToString(NetworkKind kind);
NetworkKind ParseNetworkKind(std::string_view name);

// Sorts any n inputs ascending. Empty for n <= 1.
std::vector<Comparator> BuildSortingNetwork(size_t n,
                                            NetworkKind kind = NetworkKind::kMergeExchange);

// Applies a schedule to plain keys (reference and tests).
template <class T>
void ApplyNetwork(const std::vector<Comparator>& net, std::vector<T>& keys) {
  for (const auto& c : net) {
    if (keys[c.hi] < keys[c.lo]) std::swap(keys[c.lo], keys[c.hi]);
  }
}

}  // namespace hyfl::agg
