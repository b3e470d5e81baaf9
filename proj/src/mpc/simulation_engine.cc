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

#include <utility>

#include "engines.h"
#include "hyfl/common/error.h"

namespace hyfl::mpc {
namespace {

void CheckPayloads(const ShareSet& lo, std::span<ShareSet* const> lo_payload,
                   std::span<ShareSet* const> hi_payload) {
  HYFL_ENFORCE(lo_payload.size() == hi_payload.size(), ShapeError,
               "payload count differs between slots");
  for (size_t k = 0; k < lo_payload.size(); ++k) {
    for (const ShareSet* p : {lo_payload[k], hi_payload[k]}) {
      HYFL_ENFORCE(p->valid() && p->owner() == lo.owner(), SharingError,
                   "payload not held by the comparing committee");
      HYFL_ENFORCE(p->size() == lo.size(), ShapeError,
                   "payload length differs from value length");
    }
  }
}

}  // namespace

ShareSet SimulationEngine::Share(const ring::FixedVec& secret,
                                 std::string_view target, Rng& rng,
                                 std::string_view sender) {
  const PartySet& set = party_set(target);
  ShareSet out(set.id, SplitSecret(secret, set.size, rng));
  for (int k = 0; k < set.size; ++k) {
    meter_.AddBytes(std::string(sender), set.member(k), secret.size() * 8);
  }
  meter_.AddRounds(1);
  return out;
}

ShareSet SimulationEngine::Reshare(ShareSet& shares, std::string_view from,
                                   std::string_view to, Rng& rng) {
  CheckOwner(shares, from);
  const PartySet& src = party_set(from);
  const PartySet& dst = party_set(to);
  const ring::FixedVec secret = Reconstruct(shares);
  ShareSet out(dst.id, SplitSecret(secret, dst.size, rng));
  for (int i = 0; i < src.size; ++i) {
    for (int j = 0; j < dst.size; ++j) {
      if (src.member(i) != dst.member(j)) {
        meter_.AddBytes(src.member(i), dst.member(j), secret.size() * 8);
      }
    }
  }
  meter_.AddRounds(1);
  shares.Invalidate();
  return out;
}

ring::FixedVec SimulationEngine::Reveal(const ShareSet& shares,
                                        const Receiver& to) {
  HYFL_ENFORCE(shares.valid(), SharingError, "reveal of invalidated ShareSet");
  LogReveal(shares, to);
  if (!to.out_of_band) {
    const PartySet& set = party_set(shares.owner());
    for (int i = 0; i < set.size; ++i) {
      if (set.member(i) != to.id) {
        meter_.AddBytes(set.member(i), to.id, shares.size() * 8);
      }
    }
    meter_.AddRounds(1);
  }
  return Reconstruct(shares);
}

ShareSet SimulationEngine::BeaverMul(const ShareSet& a, const ShareSet& b,
                                     MulMode mode) {
  CheckPair(a, b);
  const PartySet& set = party_set(a.owner());
  dealer_.Reserve(a.size());
  const ring::FixedVec x = Reconstruct(a);
  const ring::FixedVec y = Reconstruct(b);
  ring::FixedVec z(x.size(), x.frac_bits());
  for (size_t i = 0; i < z.size(); ++i) {
    z[i] = mode == MulMode::kFixed
               ? ring::MulTruncateRaw(x[i], y[i], x.frac_bits())
               : x[i] * y[i];
  }
  for (int i = 0; i < set.size; ++i) {
    for (int j = 0; j < set.size; ++j) {
      if (i != j) meter_.AddBytes(set.member(i), set.member(j), 2 * z.size() * 8);
    }
  }
  meter_.AddTriples(z.size());
  meter_.AddRounds(1);
  if (mode == MulMode::kFixed && set.size > 2) ChargeTruncation(set, z.size());
  return ShareSet(set.id, SplitSecret(z, set.size, dealer_.rng()));
}

void SimulationEngine::CompareExchange(ShareSet& lo, ShareSet& hi,
                                       std::span<ShareSet* const> lo_payload,
                                       std::span<ShareSet* const> hi_payload,
                                       Rng& rng, CompareKind kind) {
  CheckPair(lo, hi);
  CheckPayloads(lo, lo_payload, hi_payload);
  const PartySet& set = party_set(lo.owner());
  ring::FixedVec x = Reconstruct(lo);
  ring::FixedVec y = Reconstruct(hi);
  std::vector<ring::FixedVec> px, py;
  for (size_t k = 0; k < lo_payload.size(); ++k) {
    px.push_back(Reconstruct(*lo_payload[k]));
    py.push_back(Reconstruct(*hi_payload[k]));
  }
  for (size_t i = 0; i < x.size(); ++i) {
    if (ring::AsSigned(x[i]) > ring::AsSigned(y[i])) {
      std::swap(x[i], y[i]);
      for (size_t k = 0; k < px.size(); ++k) std::swap(px[k][i], py[k][i]);
    }
  }
  lo = ShareSet(set.id, SplitSecret(x, set.size, rng));
  hi = ShareSet(set.id, SplitSecret(y, set.size, rng));
  for (size_t k = 0; k < px.size(); ++k) {
    *lo_payload[k] = ShareSet(set.id, SplitSecret(px[k], set.size, rng));
    *hi_payload[k] = ShareSet(set.id, SplitSecret(py[k], set.size, rng));
  }
  ChargeComparisons(set, x.size(), kind);
  dealer_.Reserve(x.size() * (1 + px.size()));
  ChargeMultiplexer(set, x.size() * (1 + px.size()));
  meter_.AddRounds(1);
}

ShareSet SimulationEngine::ScalarMul(ring::FixedScalar c, const ShareSet& a) {
  HYFL_ENFORCE(a.valid(), SharingError, "operation on invalidated ShareSet");
  HYFL_ENFORCE(c.frac_bits == a.frac_bits(), ShapeError,
               "scalar precision differs from shares");
  const PartySet& set = party_set(a.owner());
  const ring::FixedVec x = Reconstruct(a);
  if (set.size > 2) {
    // Committees larger than two pay a masked opening, as the multi-party
    // backend does.
    ChargeTruncation(set, x.size());
    ring::FixedVec z(x.size(), x.frac_bits());
    for (size_t i = 0; i < z.size(); ++i) {
      z[i] = ring::MulTruncateRaw(c.raw, x[i], c.frac_bits);
    }
    return ShareSet(set.id, SplitSecret(z, set.size, dealer_.rng()));
  }
  std::vector<ring::FixedVec> out;
  for (int p = 0; p < a.parties(); ++p) out.push_back(a.share(p));
  // Members 1.. keep their locally truncated share; member 0 absorbs the
  // difference so the sum is the exact truncated product.
  for (size_t i = 0; i < x.size(); ++i) {
    uint64_t rest = 0;
    for (int p = 1; p < a.parties(); ++p) {
      out[p][i] = LocalTruncateShare(out[p][i] * c.raw, p, c.frac_bits);
      rest += out[p][i];
    }
    out[0][i] = ring::MulTruncateRaw(c.raw, x[i], c.frac_bits) - rest;
  }
  return ShareSet(a.owner(), std::move(out));
}

}  // namespace hyfl::mpc
