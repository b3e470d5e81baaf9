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

// The value domains aggregators run in.
//
// PlainDomain is a single server holding plaintext doubles (flat FL with one
// aggregator, and the float reference backend). SharedDomain is the global
// committee holding additive shares through a SharingEngine. Both expose the
// same small operation set, so every aggregator is written once.
//
// "Integer" values carry small counts and 0/1 selectors. In the shared
// domain they are raw ring integers, not fixed-point encodings.

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyfl/mpc/sharing_engine.h"

namespace hyfl::agg {

class PlainDomain {
 public:
  using Value = std::vector<double>;

  // Comparisons are counted on `meter` when given; nothing else is charged.
  explicit PlainDomain(mpc::CostMeter* meter = nullptr) : meter_(meter) {}

  size_t Size(const Value& a) const { return a.size(); }
  Value Add(const Value& a, const Value& b) const;
  Value Sub(const Value& a, const Value& b) const;
  Value Scale(double c, const Value& a) const;
  Value ScaleInt(int64_t c, const Value& a) const;
  Value Sum(const Value& a) const;
  Value Slice(const Value& a, std::span<const size_t> idx) const;
  Value Broadcast(const Value& scalar, size_t length) const;
  Value Constant(std::vector<double> values, bool integer) const;
  // Elementwise product with an integer 0/1 selector.
  Value MulSelector(const Value& selector, const Value& a) const;
  void CompareExchange(Value& lo, Value& hi, std::span<Value* const> lo_payload,
                       std::span<Value* const> hi_payload, mpc::CompareKind kind);

  // Plaintext view inside an ideal functionality and its re-entry.
  std::vector<double> Open(const Value& a, std::string_view functionality) const;
  Value FromPlain(std::vector<double> values, std::string_view functionality) const;
  // Reporting reveal of an integer value to the metrics sink.
  std::vector<int64_t> ReportInteger(const Value& a) const;
  // Opens an integer value to every member of the holding committee.
  std::vector<int64_t> OpenInteger(const Value& a) const { return ReportInteger(a); }
  void ChargeIdeal(size_t multiplications, size_t nonlinear) const;

 private:
  mpc::CostMeter* meter_;
};

class SharedDomain {
 public:
  using Value = mpc::ShareSet;

  // Values are owned by committee `owner`; `rng` feeds comparisons and
  // re-sharing of functionality outputs.
  SharedDomain(mpc::SharingEngine& engine, std::string owner, Rng& rng)
      : engine_(engine), owner_(std::move(owner)), rng_(rng) {}

  mpc::SharingEngine& engine() { return engine_; }
  const std::string& owner() const { return owner_; }

  size_t Size(const Value& a) const { return a.size(); }
  Value Add(const Value& a, const Value& b) const { return engine_.Add(a, b); }
  Value Sub(const Value& a, const Value& b) const { return engine_.Sub(a, b); }
  Value Scale(double c, const Value& a) const;
  Value ScaleInt(int64_t c, const Value& a) const { return engine_.ScaleInt(c, a); }
  Value Sum(const Value& a) const { return engine_.Sum(a); }
  Value Slice(const Value& a, std::span<const size_t> idx) const {
    return engine_.Slice(a, idx);
  }
  Value Broadcast(const Value& scalar, size_t length) const {
    return engine_.Broadcast(scalar, length);
  }
  Value Constant(std::vector<double> values, bool integer) const;
  Value MulSelector(const Value& selector, const Value& a) const {
    return engine_.BeaverMul(selector, a, mpc::MulMode::kInteger);
  }
  void CompareExchange(Value& lo, Value& hi, std::span<Value* const> lo_payload,
                       std::span<Value* const> hi_payload, mpc::CompareKind kind) {
    engine_.CompareExchange(lo, hi, lo_payload, hi_payload, rng_, kind);
  }

  std::vector<double> Open(const Value& a, std::string_view functionality) const;
  Value FromPlain(std::vector<double> values, std::string_view functionality) const;
  std::vector<int64_t> ReportInteger(const Value& a) const;
  // Opens an integer value to every member of the owning committee
  // (charged as one reveal per member).
  std::vector<int64_t> OpenInteger(const Value& a) const;
  // Charges `multiplications` Beaver products in one round and `nonlinear`
  // scalar evaluations priced by the cost model, for work done inside an
  // ideal functionality.
  void ChargeIdeal(size_t multiplications, size_t nonlinear) const;

 private:
  mpc::SharingEngine& engine_;
  std::string owner_;
  Rng& rng_;
};

}  // namespace hyfl::agg
