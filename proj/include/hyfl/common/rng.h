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

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace hyfl {

// Seeded stream used everywhere randomness is needed. Wraps mt19937_64 (its
// output sequence is fixed by the standard) and implements the derived
// distributions itself so results do not depend on the standard library.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform integer in [0, bound). bound must be > 0.
  uint64_t Below(uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform01() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }

  // Standard normal via Box-Muller (one draw per call, no caching).
  double Normal();

  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (size_t i = values.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(Below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  // `count` distinct values from [0, population), in draw order.
  std::vector<size_t> SampleWithoutReplacement(size_t population, size_t count);

 private:
  std::mt19937_64 engine_;
};

uint64_t SplitMix64(uint64_t x);

// Per-entity substream seed: hash(master, kind, id, round).
uint64_t DeriveSeed(uint64_t master, std::string_view kind, uint64_t id = 0,
                    uint64_t round = 0);

}  // namespace hyfl
