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

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <gtest/gtest.h>

#include "hyfl/common/error.h"
#include "hyfl/common/rng.h"
#include "hyfl/ring/fixed_point.h"

namespace hyfl::ring {
namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

// Exact rational value of a raw ring element.
cpp_rational ExactValue(uint64_t raw, int f) {
  return cpp_rational(cpp_int(AsSigned(raw)), cpp_int(1) << f);
}

// Exact rational of a double (every finite double is a dyadic rational).
cpp_rational ExactDouble(double x) {
  int exp = 0;
  const double mant = std::frexp(x, &exp);
  const auto m = static_cast<int64_t>(std::ldexp(mant, 53));
  exp -= 53;
  if (exp >= 0) return cpp_rational(cpp_int(m) << exp);
  return cpp_rational(cpp_int(m), cpp_int(1) << -exp);
}

cpp_rational Abs(const cpp_rational& v) { return v < 0 ? cpp_rational(-v) : v; }

const cpp_rational kUlp(cpp_int(1), cpp_int(1) << 22);

TEST(Encode, PowersOfTwo) {
  EXPECT_EQ(Encode(1.0).raw, 4194304u);
  EXPECT_EQ(Encode(-0.25).raw, (0 - (uint64_t{1} << 20)));
  EXPECT_EQ(Encode(0.0).raw, 0u);
}

TEST(Encode, TenthMatchesRationalOracle) {
  const FixedScalar v = Encode(0.1);
  EXPECT_EQ(v.raw, 419430u);
  // Decoding is exact: the double equals 419430 / 2^22 as a rational.
  EXPECT_EQ(ExactDouble(Decode(v)), ExactValue(v.raw, 22));
  EXPECT_EQ(ExactValue(v.raw, 22), cpp_rational(419430, 4194304));
  EXPECT_LE(Abs(ExactValue(v.raw, 22) - ExactDouble(0.1)), kUlp / 2);
}

TEST(Encode, NegationIsTwosComplement) {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.Uniform(1e-3, 1e5);
    EXPECT_EQ(Encode(-x).raw, 0 - Encode(x).raw);
  }
}

TEST(Encode, RejectsOutOfRange) {
  EXPECT_THROW(Encode(std::ldexp(1.0, 41)), OverflowError);
  EXPECT_THROW(Encode(-std::ldexp(1.0, 41)), OverflowError);
  EXPECT_THROW(Encode(std::nan("")), OverflowError);
  EXPECT_NO_THROW(Encode(std::ldexp(1.0, 40)));
}

TEST(Encode, RoundtripErrorBound) {
  Rng rng(11);
  const double bound = std::ldexp(1.0, -23);
  for (int i = 0; i < 100000; ++i) {
    const double x = rng.Uniform(-std::ldexp(1.0, 20), std::ldexp(1.0, 20));
    EXPECT_LE(std::fabs(Decode(Encode(x)) - x), bound);
  }
}

TEST(Encode, RepresentableValuesRoundtripExactly) {
  Rng rng(12);
  for (int i = 0; i < 10000; ++i) {
    const auto k = static_cast<int64_t>(rng.Below(uint64_t{1} << 40)) -
                   (int64_t{1} << 39);
    const double x = std::ldexp(static_cast<double>(k), -22);
    EXPECT_EQ(Decode(Encode(x)), x);
  }
}

TEST(MulTruncate, ExactCases) {
  EXPECT_EQ(MulTruncate(Encode(1.5), Encode(2.0)), Encode(3.0));
  EXPECT_EQ(MulTruncate(Encode(-1.5), Encode(2.0)), Encode(-3.0));
}

TEST(MulTruncate, TenthSquaredWithinOneUlp) {
  const FixedScalar p = MulTruncate(Encode(0.1), Encode(0.1));
  const FixedScalar target = Encode(0.01);
  // Oracle: exact product of the encoded operands, floored at 2^-22.
  const cpp_rational exact = ExactValue(Encode(0.1).raw, 22) *
                             ExactValue(Encode(0.1).raw, 22);
  EXPECT_LE(Abs(ExactValue(p.raw, 22) - exact), kUlp);
  const int64_t diff = AsSigned(p.raw) - AsSigned(target.raw);
  EXPECT_LE(std::abs(diff), 1);
}

TEST(MulTruncate, ErrorBoundAndSigns) {
  Rng rng(13);
  for (int i = 0; i < 20000; ++i) {
    const double x = rng.Uniform(-100.0, 100.0);
    const double y = rng.Uniform(-100.0, 100.0);
    const FixedScalar p = MulTruncate(Encode(x), Encode(y));
    const cpp_rational exact = ExactDouble(x) * ExactDouble(y);
    // One truncation ulp plus input quantization (|x|,|y| < 2^7).
    const cpp_rational quant = (Abs(ExactDouble(x)) + Abs(ExactDouble(y)) + 1) * kUlp / 2;
    EXPECT_LE(Abs(ExactValue(p.raw, 22) - exact), kUlp + quant);
    if (std::fabs(x * y) > 1e-3) {
      EXPECT_EQ(Decode(p) > 0, x * y > 0);
    }
  }
}

TEST(MulTruncate, OverflowDetected) {
  EXPECT_THROW(MulTruncate(Encode(3.0e6), Encode(3.0e6)), OverflowError);
  // The unchecked path wraps silently.
  EXPECT_NO_THROW(MulTruncateRaw(Encode(3.0e6).raw, Encode(3.0e6).raw, 22));
}

TEST(MulTruncate, PrecisionMismatch) {
  EXPECT_THROW(MulTruncate(Encode(1.0, 22), Encode(1.0, 16)), ShapeError);
}

TEST(AddWrap, Cases) {
  EXPECT_EQ(AddWrap(Encode(1.0), Encode(-1.0)), Encode(0.0));
  EXPECT_EQ(AddWrap(FixedScalar{UINT64_MAX, 22}, FixedScalar{1, 22}).raw, 0u);
  const FixedScalar s = AddWrap(Encode(0.3), Encode(0.4));
  EXPECT_LE(Abs(ExactValue(s.raw, 22) - ExactDouble(0.7)), kUlp);
}

TEST(AddWrap, Homomorphism) {
  Rng rng(14);
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.Uniform(-1e6, 1e6);
    const double y = rng.Uniform(-1e6, 1e6);
    EXPECT_EQ(ExactValue(AddWrap(Encode(x), Encode(y)).raw, 22),
              ExactDouble(Decode(Encode(x))) + ExactDouble(Decode(Encode(y))));
  }
}

TEST(FixedVec, LengthMismatchIsError) {
  FixedVec a(3), b(4);
  EXPECT_THROW(AddWrap(a, b), ShapeError);
  EXPECT_THROW(SubWrap(a, b), ShapeError);
  EXPECT_THROW(MulTruncate(a, b), ShapeError);
}

TEST(FixedVec, EncodeDecodeVector) {
  const std::vector<double> xs{0.5, -2.25, 3.0};
  const FixedVec v = FixedVec::Encode(xs);
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(v.Decode(), xs);
  const FixedVec sq = MulTruncate(v, v);
  EXPECT_EQ(sq.Decode(), (std::vector<double>{0.25, 5.0625, 9.0}));
}

}  // namespace
}  // namespace hyfl::ring
