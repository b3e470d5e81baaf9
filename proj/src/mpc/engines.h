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

#include "hyfl/mpc/sharing_engine.h"

namespace hyfl::mpc {

class SimulationEngine final : public SharingEngine {
 public:
  using SharingEngine::SharingEngine;

  Backend backend() const override { return Backend::kSimulation; }

  ShareSet Share(const ring::FixedVec& secret, std::string_view target,
                 Rng& rng, std::string_view sender) override;
  ShareSet Reshare(ShareSet& shares, std::string_view from,
                   std::string_view to, Rng& rng) override;
  ring::FixedVec Reveal(const ShareSet& shares, const Receiver& to) override;
  ShareSet BeaverMul(const ShareSet& a, const ShareSet& b,
                     MulMode mode) override;
  void CompareExchange(ShareSet& lo, ShareSet& hi,
                       std::span<ShareSet* const> lo_payload,
                       std::span<ShareSet* const> hi_payload, Rng& rng,
                       CompareKind kind) override;
  ShareSet ScalarMul(ring::FixedScalar c, const ShareSet& a) override;
  using SharingEngine::CompareExchange;
};

class MultiPartyEngine final : public SharingEngine {
 public:
  using SharingEngine::SharingEngine;

  Backend backend() const override { return Backend::kMultiParty; }

  ShareSet Share(const ring::FixedVec& secret, std::string_view target,
                 Rng& rng, std::string_view sender) override;
  ShareSet Reshare(ShareSet& shares, std::string_view from,
                   std::string_view to, Rng& rng) override;
  ring::FixedVec Reveal(const ShareSet& shares, const Receiver& to) override;
  ShareSet BeaverMul(const ShareSet& a, const ShareSet& b,
                     MulMode mode) override;
  void CompareExchange(ShareSet& lo, ShareSet& hi,
                       std::span<ShareSet* const> lo_payload,
                       std::span<ShareSet* const> hi_payload, Rng& rng,
                       CompareKind kind) override;
  ShareSet ScalarMul(ring::FixedScalar c, const ShareSet& a) override;
  using SharingEngine::CompareExchange;

 private:
  // Fixed-point truncation of product shares: local for two parties, one
  // dealer-masked opening otherwise.
  ShareSet Truncate(const ShareSet& product);
};

}  // namespace hyfl::mpc
