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

#include <string>
#include <vector>

#include "hyfl/common/rng.h"
#include "hyfl/ring/fixed_point.h"

namespace hyfl::mpc {

enum class CorruptionModel { kSemiHonest };

// A committee of compute parties ("G", "E1", ...). The trusted helper that
// deals correlated randomness is implicit and not counted in `size`.
struct PartySet {
  std::string id;
  int size = 2;
  CorruptionModel corruption = CorruptionModel::kSemiHonest;

  std::string member(int index) const {
    return id + "/" + std::to_string(index);
  }
};

// Additive shares of a FixedVec held by the members of one committee:
// sum_p shares[p] == secret (mod 2^64), elementwise.
class ShareSet {
 public:
  ShareSet() = default;
  ShareSet(std::string owner, std::vector<ring::FixedVec> shares);

  const std::string& owner() const { return owner_; }
  size_t size() const { return length_; }
  int parties() const { return static_cast<int>(shares_.size()); }
  int frac_bits() const;
  bool valid() const { return valid_; }

  // Throws SharingError once the set has been invalidated by a reshare.
  const ring::FixedVec& share(int party) const;
  ring::FixedVec& mutable_share(int party);

  void Invalidate();

 private:
  void CheckValid() const;

  std::string owner_;
  std::vector<ring::FixedVec> shares_;
  size_t length_ = 0;
  bool valid_ = false;
};

// Uniformly random additive split: the first n-1 shares are fresh draws (in
// party order), the last one closes the sum.
std::vector<ring::FixedVec> SplitSecret(const ring::FixedVec& secret,
                                        int parties, Rng& rng);

ring::FixedVec Reconstruct(const ShareSet& shares);

}  // namespace hyfl::mpc
