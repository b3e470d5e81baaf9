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

#include "hyfl/agg/sorting_network.h"

#include <string>

#include "hyfl/common/error.h"

namespace hyfl::agg {
namespace {

void MergeExchange(size_t n, std::vector<Comparator>& out) {
  if (n < 2) return;
  size_t t = 0;
  while ((size_t{1} << t) < n) ++t;
  for (size_t p = size_t{1} << (t - 1); p > 0; p >>= 1) {
    size_t q = size_t{1} << (t - 1);
    size_t r = 0;
    size_t d = p;
    while (true) {
      for (size_t i = 0; i + d < n; ++i) {
        if ((i & p) == r) out.push_back({i, i + d});
      }
      if (q == p) break;
      d = q - p;
      q >>= 1;
      r = p;
    }
  }
}

// Largest power of two strictly below n (n >= 2).
size_t PowerBelow(size_t n) {
  size_t k = 1;
  while (k * 2 < n) k *= 2;
  return k;
}

void Emit(size_t a, size_t b, bool ascending, std::vector<Comparator>& out) {
  out.push_back(ascending ? Comparator{a, b} : Comparator{b, a});
}

void BitonicMerge(size_t lo, size_t n, bool ascending, std::vector<Comparator>& out) {
  if (n < 2) return;
  const size_t m = PowerBelow(n);
  for (size_t i = lo; i < lo + n - m; ++i) Emit(i, i + m, ascending, out);
  BitonicMerge(lo, m, ascending, out);
  BitonicMerge(lo + m, n - m, ascending, out);
}

void BitonicSort(size_t lo, size_t n, bool ascending, std::vector<Comparator>& out) {
  if (n < 2) return;
  const size_t m = n / 2;
  BitonicSort(lo, m, !ascending, out);
  BitonicSort(lo + m, n - m, ascending, out);
  BitonicMerge(lo, n, ascending, out);
}

}  // namespace

std::string_view ToString(NetworkKind kind) {
  return kind == NetworkKind::kBitonic ? "bitonic" : "merge-exchange";
}

NetworkKind ParseNetworkKind(std::string_view name) {
  if (name == "merge-exchange") return NetworkKind::kMergeExchange;
  if (name == "bitonic") return NetworkKind::kBitonic;
  throw ConfigError("agg.network", "unknown sorting network '" + std::string(name) +
                                       "' (merge-exchange, bitonic)");
}

std::vector<Comparator> BuildSortingNetwork(size_t n, NetworkKind kind) {
  std::vector<Comparator> out;
  if (kind == NetworkKind::kMergeExchange) {
    MergeExchange(n, out);
  } else {
    BitonicSort(0, n, true, out);
  }
  return out;
}

}  // namespace hyfl::agg
