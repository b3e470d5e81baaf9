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

#include "hyfl/mpc/cost_meter.h"

namespace hyfl::mpc {

void CostMeter::AddBytes(const std::string& from, const std::string& to,
                         uint64_t bytes) {
  std::lock_guard lock(mu_);
  bytes_[{from, to}] += bytes;
  totals_.bytes += bytes;
}

void CostMeter::AddRounds(uint64_t n) {
  std::lock_guard lock(mu_);
  totals_.rounds += n;
}

void CostMeter::AddComparisons(uint64_t n) {
  std::lock_guard lock(mu_);
  totals_.comparisons += n;
}

void CostMeter::AddTallyComparisons(uint64_t n) {
  std::lock_guard lock(mu_);
  totals_.tally_comparisons += n;
}

void CostMeter::AddTriples(uint64_t n) {
  std::lock_guard lock(mu_);
  totals_.beaver_triples += n;
}

void CostMeter::AddNonlinear(uint64_t n) {
  std::lock_guard lock(mu_);
  totals_.nonlinear_ops += n;
}

CostMeter::Totals CostMeter::totals() const {
  std::lock_guard lock(mu_);
  return totals_;
}

uint64_t CostMeter::bytes_between(const std::string& from,
                                  const std::string& to) const {
  std::lock_guard lock(mu_);
  auto it = bytes_.find({from, to});
  return it == bytes_.end() ? 0 : it->second;
}

std::map<CostMeter::PairKey, uint64_t> CostMeter::bytes_by_pair() const {
  std::lock_guard lock(mu_);
  return bytes_;
}

}  // namespace hyfl::mpc
