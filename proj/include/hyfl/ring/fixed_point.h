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

// Fixed-point reals over Z_{2^64}.
//
// A real x is stored as round(x * 2^f) mod 2^64, negative values in two's
// complement. Addition is plain ring addition. Multiplication forms the ring
// product of the two raw words (which carries 2f fractional bits) and shifts
// it arithmetically right by f, exactly as an MPC engine running in
// simulation mode does. Products whose exact value does not fit a signed
// 64-bit word wrap; the checked entry points report that as OverflowError,
// the *Raw helpers used on hot paths wrap silently.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hyfl::ring {

inline constexpr int kDefaultFracBits = 22;

struct FixedScalar {
  uint64_t raw = 0;
  int frac_bits = kDefaultFracBits;

  friend bool operator==(const FixedScalar&, const FixedScalar&) = default;
};

inline int64_t AsSigned(uint64_t raw) { return static_cast<int64_t>(raw); }

// Arithmetic shift of the signed interpretation, result back in the ring.
inline uint64_t TruncateRaw(uint64_t raw, int frac_bits) {
  return static_cast<uint64_t>(AsSigned(raw) >> frac_bits);
}

// Ring product followed by truncation; wraps without checking.
inline uint64_t MulTruncateRaw(uint64_t a, uint64_t b, int frac_bits) {
  return TruncateRaw(a * b, frac_bits);
}

uint64_t EncodeRaw(double x, int frac_bits = kDefaultFracBits);
double DecodeRaw(uint64_t raw, int frac_bits = kDefaultFracBits);

// Throws OverflowError when |x| >= 2^(63 - frac_bits) or x is not finite.
FixedScalar Encode(double x, int frac_bits = kDefaultFracBits);
double Decode(FixedScalar value);

FixedScalar AddWrap(FixedScalar a, FixedScalar b);
FixedScalar SubWrap(FixedScalar a, FixedScalar b);
FixedScalar Negate(FixedScalar a);

// Throws OverflowError when the exact product of the signed raw words leaves
// the signed 64-bit range, i.e. when the ring product would have wrapped.
FixedScalar MulTruncate(FixedScalar a, FixedScalar b);

// Vector of ring elements sharing one precision.
class FixedVec {
 public:
  FixedVec() = default;
  explicit FixedVec(size_t length, int frac_bits = kDefaultFracBits)
      : raw_(length, 0), frac_bits_(frac_bits) {}
  FixedVec(std::vector<uint64_t> raw, int frac_bits)
      : raw_(std::move(raw)), frac_bits_(frac_bits) {}

  static FixedVec Encode(std::span<const double> values,
                         int frac_bits = kDefaultFracBits);
  std::vector<double> Decode() const;

  size_t size() const { return raw_.size(); }
  bool empty() const { return raw_.empty(); }
  int frac_bits() const { return frac_bits_; }

  uint64_t& operator[](size_t i) { return raw_[i]; }
  uint64_t operator[](size_t i) const { return raw_[i]; }
  FixedScalar at(size_t i) const { return {raw_.at(i), frac_bits_}; }

  std::vector<uint64_t>& raw() { return raw_; }
  const std::vector<uint64_t>& raw() const { return raw_; }

  friend bool operator==(const FixedVec&, const FixedVec&) = default;

 private:
  std::vector<uint64_t> raw_;
  int frac_bits_ = kDefaultFracBits;
};

// Elementwise ops; length or precision mismatches throw ShapeError.
FixedVec AddWrap(const FixedVec& a, const FixedVec& b);
FixedVec SubWrap(const FixedVec& a, const FixedVec& b);
FixedVec MulTruncate(const FixedVec& a, const FixedVec& b);
FixedVec ScaleTruncate(FixedScalar c, const FixedVec& a);

}  // namespace hyfl::ring
