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
#include <map>
#include <mutex>
#include <string>
#include <utility>

namespace hyfl::mpc {

// Per-comparison price of the (not cryptographically realized) secure
// comparison, plus the same for scalar nonlinear evaluations (sqrt,
// reciprocal) used by FLTrust. Reported with every run.
struct CostModel {
  uint64_t compare_bytes = 64;
  uint64_t compare_rounds = 7;
  uint64_t nonlinear_bytes = 64;
  uint64_t nonlinear_rounds = 7;
};

// Monotone communication counters. Thread-safe: party tasks of the
// multi-party backend charge it concurrently.
class CostMeter {
 public:
  struct Totals {
    uint64_t bytes = 0;
    uint64_t rounds = 0;
    // Compare-exchanges on model coordinates (sorting networks).
    uint64_t comparisons = 0;
    // Compare-exchanges on outlier tallies (TopK-Hitter).
    uint64_t tally_comparisons = 0;
    uint64_t beaver_triples = 0;
    uint64_t nonlinear_ops = 0;

    Totals operator-(const Totals& o) const {
      return {bytes - o.bytes,
              rounds - o.rounds,
              comparisons - o.comparisons,
              tally_comparisons - o.tally_comparisons,
              beaver_triples - o.beaver_triples,
              nonlinear_ops - o.nonlinear_ops};
    }
    friend bool operator==(const Totals&, const Totals&) = default;
  };

  using PairKey = std::pair<std::string, std::string>;

  void AddBytes(const std::string& from, const std::string& to,
                uint64_t bytes);
  void AddRounds(uint64_t n);
  void AddComparisons(uint64_t n);
  void AddTallyComparisons(uint64_t n);
  void AddTriples(uint64_t n);
  void AddNonlinear(uint64_t n);

  Totals totals() const;
  uint64_t bytes_between(const std::string& from, const std::string& to) const;
  std::map<PairKey, uint64_t> bytes_by_pair() const;

 private:
  mutable std::mutex mu_;
  std::map<PairKey, uint64_t> bytes_;
  Totals totals_;
};

}  // namespace hyfl::mpc
