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

#include "hyfl/mpc/share_set.h"

#include "hyfl/common/error.h"

namespace hyfl::mpc {

ShareSet::ShareSet(std::string owner, std::vector<ring::FixedVec> shares)
    : owner_(std::move(owner)), shares_(std::move(shares)), valid_(true) {
  HYFL_ENFORCE(!shares_.empty(), SharingError, "ShareSet without parties");
  length_ = shares_.front().size();
  for (const auto& s : shares_) {
    HYFL_ENFORCE(s.size() == length_, ShapeError,
                 "per-party share vectors differ in length");
    HYFL_ENFORCE(s.frac_bits() == shares_.front().frac_bits(), ShapeError,
                 "per-party share vectors differ in precision");
  }
}

int ShareSet::frac_bits() const {
  CheckValid();
  return shares_.front().frac_bits();
}

const ring::FixedVec& ShareSet::share(int party) const {
  CheckValid();
  return shares_.at(static_cast<size_t>(party));
}

ring::FixedVec& ShareSet::mutable_share(int party) {
  CheckValid();
  return shares_.at(static_cast<size_t>(party));
}

void ShareSet::Invalidate() {
  valid_ = false;
  shares_.clear();
}

void ShareSet::CheckValid() const {
  HYFL_ENFORCE(valid_, SharingError,
               "ShareSet owned by '" + owner_ + "' is no longer valid");
}

std::vector<ring::FixedVec> SplitSecret(const ring::FixedVec& secret,
                                        int parties, Rng& rng) {
  HYFL_ENFORCE(parties >= 1, SharingError, "need at least one party");
  std::vector<ring::FixedVec> shares;
  shares.reserve(static_cast<size_t>(parties));
  ring::FixedVec last = secret;
  for (int p = 0; p + 1 < parties; ++p) {
    ring::FixedVec s(secret.size(), secret.frac_bits());
    for (size_t i = 0; i < s.size(); ++i) {
      s[i] = rng.NextU64();
      last[i] -= s[i];
    }
    shares.push_back(std::move(s));
  }
  shares.push_back(std::move(last));
  return shares;
}

ring::FixedVec Reconstruct(const ShareSet& shares) {
  ring::FixedVec out(shares.size(), shares.frac_bits());
  for (int p = 0; p < shares.parties(); ++p) {
    const auto& s = shares.share(p);
    for (size_t i = 0; i < out.size(); ++i) out[i] += s[i];
  }
  return out;
}

}  // namespace hyfl::mpc
