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

#include "hyfl/agg/domain.h"

#include <cmath>

#include "hyfl/common/error.h"

namespace hyfl::agg {
namespace {

void CheckSame(size_t a, size_t b) {
  HYFL_ENFORCE(a == b, ShapeError,
               "length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

// --- PlainDomain ----------------------------------------------------------

PlainDomain::Value PlainDomain::Add(const Value& a, const Value& b) const {
  CheckSame(a.size(), b.size());
  Value out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

PlainDomain::Value PlainDomain::Sub(const Value& a, const Value& b) const {
  CheckSame(a.size(), b.size());
  Value out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

PlainDomain::Value PlainDomain::Scale(double c, const Value& a) const {
  Value out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = c * a[i];
  return out;
}

PlainDomain::Value PlainDomain::ScaleInt(int64_t c, const Value& a) const {
  return Scale(static_cast<double>(c), a);
}

PlainDomain::Value PlainDomain::Sum(const Value& a) const {
  double s = 0.0;
  for (double v : a) s += v;
  return {s};
}

PlainDomain::Value PlainDomain::Slice(const Value& a, std::span<const size_t> idx) const {
  Value out;
  out.reserve(idx.size());
  for (size_t i : idx) out.push_back(a.at(i));
  return out;
}

PlainDomain::Value PlainDomain::Broadcast(const Value& scalar, size_t length) const {
  CheckSame(scalar.size(), 1);
  return Value(length, scalar[0]);
}

PlainDomain::Value PlainDomain::Constant(std::vector<double> values, bool) const {
  return values;
}

PlainDomain::Value PlainDomain::MulSelector(const Value& selector, const Value& a) const {
  CheckSame(selector.size(), a.size());
  Value out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = selector[i] * a[i];
  return out;
}

void PlainDomain::CompareExchange(Value& lo, Value& hi, std::span<Value* const> lo_payload,
                                  std::span<Value* const> hi_payload,
                                  mpc::CompareKind kind) {
  CheckSame(lo.size(), hi.size());
  CheckSame(lo_payload.size(), hi_payload.size());
  for (size_t i = 0; i < lo.size(); ++i) {
    if (hi[i] < lo[i]) {
      std::swap(lo[i], hi[i]);
      for (size_t p = 0; p < lo_payload.size(); ++p) {
        std::swap((*lo_payload[p])[i], (*hi_payload[p])[i]);
      }
    }
  }
  if (meter_ != nullptr) {
    if (kind == mpc::CompareKind::kCoordinate) {
      meter_->AddComparisons(lo.size());
    } else {
      meter_->AddTallyComparisons(lo.size());
    }
  }
}

std::vector<double> PlainDomain::Open(const Value& a, std::string_view) const { return a; }

PlainDomain::Value PlainDomain::FromPlain(std::vector<double> values, std::string_view) const {
  return values;
}

std::vector<int64_t> PlainDomain::ReportInteger(const Value& a) const {
  std::vector<int64_t> out;
  for (double v : a) out.push_back(std::llround(v));
  return out;
}

void PlainDomain::ChargeIdeal(size_t, size_t nonlinear) const {
  if (meter_ != nullptr) meter_->AddNonlinear(nonlinear);
}

// --- SharedDomain ---------------------------------------------------------

SharedDomain::Value SharedDomain::Scale(double c, const Value& a) const {
  return engine_.ScalarMul(ring::Encode(c, a.frac_bits()), a);
}

SharedDomain::Value SharedDomain::Constant(std::vector<double> values, bool integer) const {
  ring::FixedVec v(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    v[i] = integer ? static_cast<uint64_t>(static_cast<int64_t>(std::llround(values[i])))
                   : ring::EncodeRaw(values[i], v.frac_bits());
  }
  return engine_.PublicConstant(v, owner_);
}

std::vector<double> SharedDomain::Open(const Value& a, std::string_view functionality) const {
  return engine_.OpenInFunctionality(a, functionality).Decode();
}

SharedDomain::Value SharedDomain::FromPlain(std::vector<double> values,
                                            std::string_view functionality) const {
  return engine_.ShareFromFunctionality(ring::FixedVec::Encode(values), owner_, rng_,
                                        functionality);
}

std::vector<int64_t> SharedDomain::ReportInteger(const Value& a) const {
  const ring::FixedVec v = engine_.Reveal(a, mpc::Receiver::Metrics());
  std::vector<int64_t> out;
  for (uint64_t raw : v.raw()) out.push_back(ring::AsSigned(raw));
  return out;
}

std::vector<int64_t> SharedDomain::OpenInteger(const Value& a) const {
  const mpc::PartySet& set = engine_.party_set(owner_);
  ring::FixedVec v;
  for (int i = 0; i < set.size; ++i) v = engine_.Reveal(a, mpc::Receiver::Member(set, i));
  std::vector<int64_t> out;
  for (uint64_t raw : v.raw()) out.push_back(ring::AsSigned(raw));
  return out;
}

void SharedDomain::ChargeIdeal(size_t multiplications, size_t nonlinear) const {
  const mpc::PartySet& set = engine_.party_set(owner_);
  mpc::CostMeter& meter = engine_.meter();
  const mpc::CostModel& cost = engine_.cost_model();
  for (int i = 0; i < set.size; ++i) {
    for (int j = 0; j < set.size; ++j) {
      if (i != j) meter.AddBytes(set.member(i), set.member(j), 2 * multiplications * 8);
    }
  }
  meter.AddTriples(multiplications);
  meter.AddRounds(multiplications > 0 ? 1 : 0);
  if (nonlinear > 0) {
    meter.AddNonlinear(nonlinear);
    meter.AddBytes(set.member(0), set.member(1), nonlinear * cost.nonlinear_bytes);
    meter.AddRounds(cost.nonlinear_rounds);
  }
}

}  // namespace hyfl::agg
