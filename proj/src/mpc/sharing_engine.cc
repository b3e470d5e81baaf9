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

#include "hyfl/mpc/sharing_engine.h"

#include "hyfl/common/error.h"
#include "engines.h"

namespace hyfl::mpc {

void TripleDealer::Reserve(size_t length) {
  std::lock_guard lock(mu_);
  if (length > budget_ - issued_) {
    throw SharingError("triple dealer exhausted (budget " +
                       std::to_string(budget_) + ")");
  }
  issued_ += length;
}

TripleDealer::Triple TripleDealer::Next(size_t length, int parties,
                                        int frac_bits) {
  Reserve(length);
  std::lock_guard lock(mu_);
  ring::FixedVec a(length, frac_bits), b(length, frac_bits),
      c(length, frac_bits);
  for (size_t i = 0; i < length; ++i) {
    a[i] = rng_.NextU64();
    b[i] = rng_.NextU64();
    c[i] = a[i] * b[i];
  }
  return {SplitSecret(a, parties, rng_), SplitSecret(b, parties, rng_),
          SplitSecret(c, parties, rng_)};
}

TripleDealer::TruncationPair TripleDealer::NextTruncation(size_t length,
                                                          int parties,
                                                          int frac_bits) {
  std::lock_guard lock(mu_);
  ring::FixedVec r(length, frac_bits), shifted(length, frac_bits);
  for (size_t i = 0; i < length; ++i) {
    r[i] = rng_.NextU64() >> 2;
    shifted[i] = r[i] >> frac_bits;
  }
  return {SplitSecret(r, parties, rng_), SplitSecret(shifted, parties, rng_)};
}

SharingEngine::SharingEngine(const EngineOptions& options)
    : options_(options),
      dealer_(DeriveSeed(options.seed, "dealer"), options.triple_budget) {}

SharingEngine::~SharingEngine() = default;

void SharingEngine::RegisterPartySet(const PartySet& set) {
  HYFL_ENFORCE(set.size >= 2, SharingError,
               "party set '" + set.id + "' needs at least 2 members");
  HYFL_ENFORCE(!party_sets_.contains(set.id), SharingError,
               "duplicate party set id '" + set.id + "'");
  party_sets_.emplace(set.id, set);
}

bool SharingEngine::HasPartySet(std::string_view id) const {
  return party_sets_.find(id) != party_sets_.end();
}

const PartySet& SharingEngine::party_set(std::string_view id) const {
  auto it = party_sets_.find(id);
  HYFL_ENFORCE(it != party_sets_.end(), SharingError,
               "unknown party set '" + std::string(id) + "'");
  return it->second;
}

void SharingEngine::CheckOwner(const ShareSet& s,
                               std::string_view expected) const {
  HYFL_ENFORCE(s.valid(), SharingError, "operation on invalidated ShareSet");
  HYFL_ENFORCE(s.owner() == expected, SharingError,
               "ShareSet owned by '" + s.owner() + "', expected '" +
                   std::string(expected) + "'");
}

void SharingEngine::CheckPair(const ShareSet& a, const ShareSet& b) const {
  HYFL_ENFORCE(a.valid() && b.valid(), SharingError,
               "operation on invalidated ShareSet");
  HYFL_ENFORCE(a.owner() == b.owner(), SharingError,
               "ShareSets held by different committees: '" + a.owner() +
                   "' vs '" + b.owner() + "'");
  HYFL_ENFORCE(a.size() == b.size(), ShapeError,
               "ShareSet length mismatch: " + std::to_string(a.size()) +
                   " vs " + std::to_string(b.size()));
}

void SharingEngine::LogReveal(const ShareSet& s, const Receiver& to) {
  std::lock_guard lock(log_mu_);
  reveals_.push_back({s.owner(), to.id, s.size()});
}

void SharingEngine::ChargeMultiplexer(const PartySet& set, size_t elements) {
  for (int i = 0; i < set.size; ++i) {
    for (int j = 0; j < set.size; ++j) {
      if (i != j) meter_.AddBytes(set.member(i), set.member(j), 2 * elements * 8);
    }
  }
  meter_.AddTriples(elements);
}

void SharingEngine::ChargeTruncation(const PartySet& set, size_t elements) {
  for (int i = 0; i < set.size; ++i) {
    for (int j = 0; j < set.size; ++j) {
      if (i != j) meter_.AddBytes(set.member(i), set.member(j), elements * 8);
    }
  }
  meter_.AddRounds(1);
}

void SharingEngine::ChargeComparisons(const PartySet& set, size_t elements,
                                      CompareKind kind) {
  if (kind == CompareKind::kCoordinate) {
    meter_.AddComparisons(elements);
  } else {
    meter_.AddTallyComparisons(elements);
  }
  meter_.AddBytes(set.member(0), set.member(1),
                  elements * options_.cost_model.compare_bytes);
  meter_.AddRounds(options_.cost_model.compare_rounds);
}

// --- local operations -------------------------------------------------------

ShareSet SharingEngine::Add(const ShareSet& a, const ShareSet& b) const {
  CheckPair(a, b);
  std::vector<ring::FixedVec> out;
  for (int p = 0; p < a.parties(); ++p) {
    out.push_back(ring::AddWrap(a.share(p), b.share(p)));
  }
  return ShareSet(a.owner(), std::move(out));
}

ShareSet SharingEngine::Sub(const ShareSet& a, const ShareSet& b) const {
  CheckPair(a, b);
  std::vector<ring::FixedVec> out;
  for (int p = 0; p < a.parties(); ++p) {
    out.push_back(ring::SubWrap(a.share(p), b.share(p)));
  }
  return ShareSet(a.owner(), std::move(out));
}

ShareSet SharingEngine::ScaleInt(int64_t c, const ShareSet& a) const {
  HYFL_ENFORCE(a.valid(), SharingError, "operation on invalidated ShareSet");
  std::vector<ring::FixedVec> out;
  for (int p = 0; p < a.parties(); ++p) {
    ring::FixedVec s = a.share(p);
    for (auto& v : s.raw()) v *= static_cast<uint64_t>(c);
    out.push_back(std::move(s));
  }
  return ShareSet(a.owner(), std::move(out));
}

ShareSet SharingEngine::AddPublic(const ShareSet& a,
                                  const ring::FixedVec& value) const {
  HYFL_ENFORCE(a.valid(), SharingError, "operation on invalidated ShareSet");
  HYFL_ENFORCE(a.size() == value.size(), ShapeError,
               "public addend length mismatch");
  std::vector<ring::FixedVec> out;
  for (int p = 0; p < a.parties(); ++p) out.push_back(a.share(p));
  out[0] = ring::AddWrap(out[0], value);
  return ShareSet(a.owner(), std::move(out));
}

ShareSet SharingEngine::PublicConstant(const ring::FixedVec& value,
                                       std::string_view owner) const {
  const PartySet& set = party_set(owner);
  std::vector<ring::FixedVec> out;
  out.push_back(value);
  for (int p = 1; p < set.size; ++p) {
    out.emplace_back(value.size(), value.frac_bits());
  }
  return ShareSet(set.id, std::move(out));
}

ShareSet SharingEngine::Slice(const ShareSet& a,
                              std::span<const size_t> indices) const {
  HYFL_ENFORCE(a.valid(), SharingError, "operation on invalidated ShareSet");
  std::vector<ring::FixedVec> out;
  for (int p = 0; p < a.parties(); ++p) {
    const auto& src = a.share(p);
    ring::FixedVec s(indices.size(), src.frac_bits());
    for (size_t k = 0; k < indices.size(); ++k) {
      HYFL_ENFORCE(indices[k] < src.size(), ShapeError,
                   "slice index out of range");
      s[k] = src[indices[k]];
    }
    out.push_back(std::move(s));
  }
  return ShareSet(a.owner(), std::move(out));
}

ShareSet SharingEngine::Sum(const ShareSet& a) const {
  HYFL_ENFORCE(a.valid(), SharingError, "operation on invalidated ShareSet");
  std::vector<ring::FixedVec> out;
  for (int p = 0; p < a.parties(); ++p) {
    ring::FixedVec s(1, a.frac_bits());
    for (uint64_t v : a.share(p).raw()) s[0] += v;
    out.push_back(std::move(s));
  }
  return ShareSet(a.owner(), std::move(out));
}

ShareSet SharingEngine::Broadcast(const ShareSet& scalar,
                                  size_t length) const {
  HYFL_ENFORCE(scalar.valid() && scalar.size() == 1, ShapeError,
               "Broadcast expects a length-1 ShareSet");
  std::vector<ring::FixedVec> out;
  for (int p = 0; p < scalar.parties(); ++p) {
    out.emplace_back(std::vector<uint64_t>(length, scalar.share(p)[0]),
                     scalar.frac_bits());
  }
  return ShareSet(scalar.owner(), std::move(out));
}

ShareSet SharingEngine::Concat(std::span<const ShareSet> parts) const {
  HYFL_ENFORCE(!parts.empty(), ShapeError, "Concat of nothing");
  std::vector<ring::FixedVec> out;
  for (int p = 0; p < parts.front().parties(); ++p) {
    ring::FixedVec s(0, parts.front().frac_bits());
    for (const auto& part : parts) {
      HYFL_ENFORCE(part.owner() == parts.front().owner(), SharingError,
                   "Concat across committees");
      const auto& src = part.share(p).raw();
      s.raw().insert(s.raw().end(), src.begin(), src.end());
    }
    out.push_back(std::move(s));
  }
  return ShareSet(parts.front().owner(), std::move(out));
}

// --- ideal functionalities ---------------------------------------------------

ring::FixedVec SharingEngine::OpenInFunctionality(
    const ShareSet& shares, std::string_view functionality) {
  HYFL_ENFORCE(shares.valid(), SharingError,
               "operation on invalidated ShareSet");
  {
    std::lock_guard lock(log_mu_);
    functionalities_.push_back(
        {shares.owner(), std::string(functionality), shares.size()});
  }
  return Reconstruct(shares);
}

ShareSet SharingEngine::ShareFromFunctionality(const ring::FixedVec& output,
                                               std::string_view owner,
                                               Rng& rng,
                                               std::string_view functionality) {
  const PartySet& set = party_set(owner);
  {
    std::lock_guard lock(log_mu_);
    functionalities_.push_back({set.id, std::string(functionality),
                                output.size()});
  }
  return ShareSet(set.id, SplitSecret(output, set.size, rng));
}

std::vector<RevealRecord> SharingEngine::reveal_log() const {
  std::lock_guard lock(log_mu_);
  return reveals_;
}

std::vector<FunctionalityRecord> SharingEngine::functionality_log() const {
  std::lock_guard lock(log_mu_);
  return functionalities_;
}

std::unique_ptr<SharingEngine> MakeEngine(Backend backend,
                                          const EngineOptions& options) {
  switch (backend) {
    case Backend::kSimulation:
      return std::make_unique<SimulationEngine>(options);
    case Backend::kMultiParty:
      return std::make_unique<MultiPartyEngine>(options);
  }
  throw SharingError("unknown backend");
}

uint64_t LocalTruncateShare(uint64_t share, int party, int frac_bits) {
  if (party == 0) return ring::TruncateRaw(share, frac_bits);
  return 0 - ring::TruncateRaw(0 - share, frac_bits);
}

}  // namespace hyfl::mpc
