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

#include "hyfl/ring/fixed_point.h"

#include <cmath>
#include <string>

#include "hyfl/common/error.h"

namespace hyfl::ring {
namespace {

void CheckPrecision(int frac_bits) {
  HYFL_ENFORCE(frac_bits >= 0 && frac_bits < 63, ShapeError,
               "fracBits must lie in [0, 63)");
}

void CheckSame(int a, int b) {
  HYFL_ENFORCE(a == b, ShapeError,
               "fixed-point precision mismatch: " + std::to_string(a) +
                   " vs " + std::to_string(b));
}

void CheckSame(const FixedVec& a, const FixedVec& b) {
  HYFL_ENFORCE(a.size() == b.size(), ShapeError,
               "FixedVec length mismatch: " + std::to_string(a.size()) +
                   " vs " + std::to_string(b.size()));
  CheckSame(a.frac_bits(), b.frac_bits());
}

uint64_t CheckedMul(uint64_t a, uint64_t b, int frac_bits) {
  const __int128 exact =
      static_cast<__int128>(AsSigned(a)) * static_cast<__int128>(AsSigned(b));
  if (exact > INT64_MAX || exact < INT64_MIN) {
    throw OverflowError("fixed-point product wraps the 64-bit ring");
  }
  return TruncateRaw(static_cast<uint64_t>(static_cast<int64_t>(exact)),
                     frac_bits);
}

}  // namespace

uint64_t EncodeRaw(double x, int frac_bits) {
  return static_cast<uint64_t>(std::llround(std::ldexp(x, frac_bits)));
}

double DecodeRaw(uint64_t raw, int frac_bits) {
  return std::ldexp(static_cast<double>(AsSigned(raw)), -frac_bits);
}

FixedScalar Encode(double x, int frac_bits) {
  CheckPrecision(frac_bits);
  const double limit = std::ldexp(1.0, 63 - frac_bits);
  if (!std::isfinite(x) || std::fabs(x) >= limit) {
    throw OverflowError("value " + std::to_string(x) +
                        " not representable with " +
                        std::to_string(frac_bits) + " fractional bits");
  }
  return {EncodeRaw(x, frac_bits), frac_bits};
}

double Decode(FixedScalar value) {
  return DecodeRaw(value.raw, value.frac_bits);
}

FixedScalar AddWrap(FixedScalar a, FixedScalar b) {
  CheckSame(a.frac_bits, b.frac_bits);
  return {a.raw + b.raw, a.frac_bits};
}

FixedScalar SubWrap(FixedScalar a, FixedScalar b) {
  CheckSame(a.frac_bits, b.frac_bits);
  return {a.raw - b.raw, a.frac_bits};
}

FixedScalar Negate(FixedScalar a) { return {0 - a.raw, a.frac_bits}; }

FixedScalar MulTruncate(FixedScalar a, FixedScalar b) {
  CheckSame(a.frac_bits, b.frac_bits);
  return {CheckedMul(a.raw, b.raw, a.frac_bits), a.frac_bits};
}

FixedVec FixedVec::Encode(std::span<const double> values, int frac_bits) {
  FixedVec out(values.size(), frac_bits);
  for (size_t i = 0; i < values.size(); ++i) {
    out[i] = ring::Encode(values[i], frac_bits).raw;
  }
  return out;
}

std::vector<double> FixedVec::Decode() const {
  std::vector<double> out(raw_.size());
  for (size_t i = 0; i < raw_.size(); ++i) {
    out[i] = DecodeRaw(raw_[i], frac_bits_);
  }
  return out;
}

FixedVec AddWrap(const FixedVec& a, const FixedVec& b) {
  CheckSame(a, b);
  FixedVec out(a.size(), a.frac_bits());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

FixedVec SubWrap(const FixedVec& a, const FixedVec& b) {
  CheckSame(a, b);
  FixedVec out(a.size(), a.frac_bits());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

FixedVec MulTruncate(const FixedVec& a, const FixedVec& b) {
  CheckSame(a, b);
  FixedVec out(a.size(), a.frac_bits());
  for (size_t i = 0; i < a.size(); ++i) {
    out[i] = CheckedMul(a[i], b[i], a.frac_bits());
  }
  return out;
}

FixedVec ScaleTruncate(FixedScalar c, const FixedVec& a) {
  CheckSame(c.frac_bits, a.frac_bits());
  FixedVec out(a.size(), a.frac_bits());
  for (size_t i = 0; i < a.size(); ++i) {
    out[i] = CheckedMul(c.raw, a[i], a.frac_bits());
  }
  return out;
}

}  // namespace hyfl::ring
