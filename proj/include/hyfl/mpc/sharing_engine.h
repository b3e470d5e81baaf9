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

// Additive secret sharing over Z_{2^64} with cost accounting.
//
// Two interchangeable backends sit behind SharingEngine:
//
//  * SimulationEngine: runs in the caller's thread. Products, comparisons
//    and truncations are evaluated on the reconstructed values and the
//    result is re-shared; every protocol step is charged to the CostMeter by
//    formula.
//  * MultiPartyEngine: every committee member is its own task holding only
//    its share; parties exchange messages over point-to-point channels and
//    the meter counts the bytes actually sent. Beaver triples come from a
//    trusted dealer, comparisons from a trusted helper (cost-modeled).
//
// Charges (n = committee size, L = vector length, 8 bytes per element):
//   Share            n * L * 8 bytes, 1 round
//   Reshare          L * 8 bytes per (from, to) member pair, 1 round
//   Reveal           (n - 1) * L * 8 to a member, n * L * 8 to an outsider,
//                    1 round; reporting reveals to the metrics sink are free
//   Add/Sub/Scale*   nothing (ScalarMul in committees of more than two
//                    members pays the masked truncation opening below)
//   BeaverMul        2 * L * 8 bytes per ordered member pair, 1 round,
//                    L triples; committees of more than two members pay one
//                    more masked opening (L * 8 per ordered pair, 1 round)
//                    to truncate fixed-point products
//   CompareExchange  L comparisons, CostModel bytes/rounds per comparison,
//                    plus one BeaverMul-style multiplexer round over the
//                    values and payloads

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyfl/common/rng.h"
#include "hyfl/mpc/cost_meter.h"
#include "hyfl/mpc/share_set.h"
#include "hyfl/ring/fixed_point.h"

namespace hyfl::mpc {

enum class Backend { kSimulation, kMultiParty };

// kFixed truncates the product by the precision; kInteger keeps the plain
// ring product (used for 0/1 selectors and counters).
enum class MulMode { kFixed, kInteger };

// Which counter a compare-exchange is charged to.
enum class CompareKind { kCoordinate, kTally };

// Who learns a revealed value.
struct Receiver {
  std::string id;
  // Reporting-only reveal (metrics evaluator): logged, not charged.
  bool out_of_band = false;

  static Receiver Metrics() { return {"metrics", true}; }
  static Receiver Client(uint64_t client_id) {
    return {"client:" + std::to_string(client_id), false};
  }
  static Receiver Member(const PartySet& set, int index) {
    return {set.member(index), false};
  }
};

struct RevealRecord {
  std::string owner;
  std::string receiver;
  size_t length = 0;
};

struct FunctionalityRecord {
  std::string owner;
  std::string name;
  size_t length = 0;
};

// Trusted dealer of Beaver triples. Generates lazily from its own seeded
// stream; a finite budget (in multiplications) makes exhaustion testable.
class TripleDealer {
 public:
  struct Triple {
    std::vector<ring::FixedVec> a, b, c;  // per-party shares, c = a * b
  };

  TripleDealer(uint64_t seed, uint64_t budget) : rng_(seed), budget_(budget) {}

  // Shares of a mask r in [0, 2^62) and of r >> frac_bits, used to
  // truncate products held by more than two parties.
  struct TruncationPair {
    std::vector<ring::FixedVec> r, r_shifted;
  };

  // Charges the budget without materializing shares.
  void Reserve(size_t length);
  Triple Next(size_t length, int parties, int frac_bits);
  TruncationPair NextTruncation(size_t length, int parties, int frac_bits);

  uint64_t issued() const { return issued_; }
  Rng& rng() { return rng_; }

 private:
  std::mutex mu_;
  Rng rng_;
  uint64_t budget_;
  uint64_t issued_ = 0;
};

struct EngineOptions {
  uint64_t seed = 1;
  CostModel cost_model;
  uint64_t triple_budget = UINT64_MAX;
};

class SharingEngine {
 public:
  explicit SharingEngine(const EngineOptions& options);
  virtual ~SharingEngine();

  virtual Backend backend() const = 0;

  // Throws SharingError on duplicate ids or size < 2.
  void RegisterPartySet(const PartySet& set);
  bool HasPartySet(std::string_view id) const;
  const PartySet& party_set(std::string_view id) const;

  CostMeter& meter() { return meter_; }
  const CostMeter& meter() const { return meter_; }
  const CostModel& cost_model() const { return options_.cost_model; }

  // --- communicating protocols -------------------------------------------

  virtual ShareSet Share(const ring::FixedVec& secret, std::string_view target,
                         Rng& rng, std::string_view sender = "client") = 0;

  // Moves `shares` (owned by `from`) to committee `to` with fresh
  // randomness. `shares` is invalidated.
  virtual ShareSet Reshare(ShareSet& shares, std::string_view from,
                           std::string_view to, Rng& rng) = 0;

  virtual ring::FixedVec Reveal(const ShareSet& shares,
                                const Receiver& to) = 0;

  virtual ShareSet BeaverMul(const ShareSet& a, const ShareSet& b,
                             MulMode mode = MulMode::kFixed) = 0;

  // Elementwise: afterwards lo holds min(lo, hi) and hi holds max(lo, hi)
  // (signed ring order). Payload vectors, which must match the value
  // length, follow their value through the swap.
  virtual void CompareExchange(ShareSet& lo, ShareSet& hi,
                               std::span<ShareSet* const> lo_payload,
                               std::span<ShareSet* const> hi_payload, Rng& rng,
                               CompareKind kind = CompareKind::kCoordinate) = 0;

  void CompareExchange(ShareSet& lo, ShareSet& hi, Rng& rng,
                       CompareKind kind = CompareKind::kCoordinate) {
    CompareExchange(lo, hi, {}, {}, rng, kind);
  }

  // --- local operations (no communication) -------------------------------

  // Public fixed-point factor, truncated product. Free for two-member
  // committees; larger committees pay one masked opening for truncation.
  virtual ShareSet ScalarMul(ring::FixedScalar c, const ShareSet& a) = 0;

  ShareSet Add(const ShareSet& a, const ShareSet& b) const;
  ShareSet Sub(const ShareSet& a, const ShareSet& b) const;
  // Public integer factor, exact.
  ShareSet ScaleInt(int64_t c, const ShareSet& a) const;
  ShareSet AddPublic(const ShareSet& a, const ring::FixedVec& value) const;
  // Sharing of a public constant: member 0 holds it, the others hold zero.
  ShareSet PublicConstant(const ring::FixedVec& value,
                          std::string_view owner) const;
  ShareSet Slice(const ShareSet& a, std::span<const size_t> indices) const;
  ShareSet Sum(const ShareSet& a) const;
  ShareSet Broadcast(const ShareSet& scalar, size_t length) const;
  ShareSet Concat(std::span<const ShareSet> parts) const;

  // --- ideal functionalities ---------------------------------------------

  // Plaintext view used *inside* an ideal functionality (Train, Predict,
  // nonlinear scalar evaluation). Not a reveal to any participant; logged.
  ring::FixedVec OpenInFunctionality(const ShareSet& shares,
                                     std::string_view functionality);
  ShareSet ShareFromFunctionality(const ring::FixedVec& output,
                                  std::string_view owner, Rng& rng,
                                  std::string_view functionality);

  std::vector<RevealRecord> reveal_log() const;
  std::vector<FunctionalityRecord> functionality_log() const;

 protected:
  void CheckOwner(const ShareSet& s, std::string_view expected) const;
  void CheckPair(const ShareSet& a, const ShareSet& b) const;
  void LogReveal(const ShareSet& s, const Receiver& to);

  // Formula charges shared by both backends.
  void ChargeMultiplexer(const PartySet& set, size_t elements);
  void ChargeTruncation(const PartySet& set, size_t elements);
  void ChargeComparisons(const PartySet& set, size_t elements,
                         CompareKind kind);

  EngineOptions options_;
  CostMeter meter_;
  TripleDealer dealer_;

 private:
  std::map<std::string, PartySet, std::less<>> party_sets_;
  mutable std::mutex log_mu_;
  std::vector<RevealRecord> reveals_;
  std::vector<FunctionalityRecord> functionalities_;
};

std::unique_ptr<SharingEngine> MakeEngine(Backend backend,
                                          const EngineOptions& options);

// Local truncation of a product share as done by 2PC engines without
// interaction: member 0 shifts its share, the other shifts the negation.
// For two parties the reconstructed value is within one ulp of the exact
// shift with overwhelming probability; it is not valid for more parties.
uint64_t LocalTruncateShare(uint64_t share, int party, int frac_bits);

}  // namespace hyfl::mpc
