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

#include "hyfl/common/rng.h"

#include <cmath>
#include <numbers>
#include <unordered_map>

#include "hyfl/common/error.h"

namespace hyfl {

uint64_t Rng::Below(uint64_t bound) {
  HYFL_ENFORCE(bound > 0, Error, "Rng::Below: empty range");
  // Rejection sampling on the top of the range keeps the draw unbiased.
  const uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  uint64_t x;
  do {
    x = NextU64();
  } while (x >= limit);
  return x % bound;
}

double Rng::Normal() {
  double u1 = Uniform01();
  while (u1 <= 0.0) u1 = Uniform01();
  const double u2 = Uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<size_t> Rng::SampleWithoutReplacement(size_t population,
                                                  size_t count) {
  HYFL_ENFORCE(count <= population, Error,
               "sample size exceeds population");
  // Sparse Fisher-Yates: only touched slots are materialized.
  std::unordered_map<size_t, size_t> moved;
  std::vector<size_t> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    const size_t j = i + static_cast<size_t>(Below(population - i));
    auto value_at = [&](size_t k) {
      auto it = moved.find(k);
      return it == moved.end() ? k : it->second;
    };
    const size_t vj = value_at(j);
    const size_t vi = value_at(i);
    moved[j] = vi;
    out.push_back(vj);
  }
  return out;
}

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t DeriveSeed(uint64_t master, std::string_view kind, uint64_t id,
                    uint64_t round) {
  uint64_t kind_hash = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : kind) {
    kind_hash ^= c;
    kind_hash *= 0x100000001b3ULL;
  }
  uint64_t h = SplitMix64(master);
  h = SplitMix64(h ^ kind_hash);
  h = SplitMix64(h ^ id);
  h = SplitMix64(h ^ (round * 0x9e3779b97f4a7c15ULL));
  return h;
}

}  // namespace hyfl
