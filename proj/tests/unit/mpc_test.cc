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

#include <gtest/gtest.h>

#include <array>
#include <random>

#include "hyfl/common/error.h"
#include "hyfl/mpc/sharing_engine.h"

namespace hyfl::mpc {
namespace {

using ring::Encode;
using ring::FixedVec;

class EngineTest : public ::testing::TestWithParam<Backend> {
 protected:
  void SetUp() override {
    EngineOptions options;
    options.seed = 5;
    engine_ = MakeEngine(GetParam(), options);
    engine_->RegisterPartySet({"G", 2});
    engine_->RegisterPartySet({"E1", 2});
    engine_->RegisterPartySet({"E3", 3});
  }

  bool multiparty() const { return GetParam() == Backend::kMultiParty; }

  FixedVec RandomVec(Rng& rng, size_t n, double lo = -100, double hi = 100) {
    std::vector<double> xs(n);
    for (auto& x : xs) x = rng.Uniform(lo, hi);
    return FixedVec::Encode(xs);
  }

  std::unique_ptr<SharingEngine> engine_;
  Rng rng_{99};
};

TEST_P(EngineTest, ShareRevealRoundtrip) {
  const FixedVec x = FixedVec::Encode(std::vector<double>{5.0});
  const ShareSet s = engine_->Share(x, "G", rng_);
  EXPECT_EQ(engine_->Reveal(s, Receiver::Metrics()).Decode()[0], 5.0);
}

TEST_P(EngineTest, ZeroVectorSharesSumToZero) {
  const ShareSet s = engine_->Share(FixedVec(16), "E3", rng_);
  for (size_t i = 0; i < 16; ++i) {
    uint64_t sum = 0;
    for (int p = 0; p < s.parties(); ++p) sum += s.share(p)[i];
    EXPECT_EQ(sum, 0u);
  }
}

TEST_P(EngineTest, SeededShareReplaysGenerator) {
  Rng rng(42);
  const ShareSet s = engine_->Share(FixedVec(1), "G", rng);
  std::mt19937_64 oracle(42);
  const uint64_t r = oracle();
  EXPECT_EQ(s.share(0)[0], r);
  EXPECT_EQ(s.share(1)[0], 0 - r);
}

TEST_P(EngineTest, ConservationOnRawValues) {
  for (int t = 0; t < 200; ++t) {
    FixedVec x(100);
    for (size_t i = 0; i < x.size(); ++i) x[i] = rng_.NextU64();
    const ShareSet s = engine_->Share(x, "G", rng_);
    EXPECT_EQ(engine_->Reveal(s, Receiver::Metrics()), x);
  }
}

TEST_P(EngineTest, ShareCharges) {
  const auto before = engine_->meter().totals();
  engine_->Share(FixedVec(10), "E3", rng_, "client:7");
  const auto delta = engine_->meter().totals() - before;
  EXPECT_EQ(delta.bytes, 3u * 10 * 8);
  EXPECT_EQ(delta.rounds, 1u);
  EXPECT_EQ(engine_->meter().bytes_between("client:7", "E3/2"), 80u);
}

TEST_P(EngineTest, ReshareRoundtripAndInvalidation) {
  const FixedVec x = RandomVec(rng_, 20);
  ShareSet g = engine_->Share(x, "G", rng_);
  const auto before = engine_->meter().totals();
  ShareSet e = engine_->Reshare(g, "G", "E3", rng_);
  const auto delta = engine_->meter().totals() - before;
  EXPECT_EQ(e.owner(), "E3");
  EXPECT_EQ(engine_->Reveal(e, Receiver::Member(engine_->party_set("E3"), 0)), x);
  EXPECT_FALSE(g.valid());
  EXPECT_THROW(engine_->Reveal(g, Receiver::Metrics()), SharingError);
  EXPECT_EQ(delta.bytes, 2u * 3 * 20 * 8);
  EXPECT_EQ(delta.rounds, 1u);
}

TEST_P(EngineTest, ReshareOwnershipMismatch) {
  ShareSet g = engine_->Share(FixedVec(2), "G", rng_);
  EXPECT_THROW(engine_->Reshare(g, "E1", "G", rng_), SharingError);
  EXPECT_THROW(engine_->Reshare(g, "G", "nowhere", rng_), SharingError);
}

TEST_P(EngineTest, ReshareWithinCommitteeRerandomizes) {
  const FixedVec x = RandomVec(rng_, 1);
  int changed = 0;
  for (int t = 0; t < 1000; ++t) {
    ShareSet s = engine_->Share(x, "G", rng_);
    const uint64_t old0 = s.share(0)[0];
    Rng fresh(1000 + t);
    ShareSet r = engine_->Reshare(s, "G", "G", fresh);
    if (r.share(0)[0] != old0) ++changed;
    EXPECT_EQ(Reconstruct(r), x);
  }
  EXPECT_EQ(changed, 1000);
}

TEST_P(EngineTest, ResharePreservesModelLength) {
  // LeNet-5 parameter count: (1*5*5+1)*6 + (6*5*5+1)*16 + (256+1)*120
  // + (120+1)*84 + (84+1)*10.
  const size_t lenet = (25 + 1) * 6 + (150 + 1) * 16 + (256 + 1) * 120 +
                       (120 + 1) * 84 + (84 + 1) * 10;
  ASSERT_EQ(lenet, 44426u);
  ShareSet s = engine_->Share(FixedVec(lenet), "G", rng_);
  EXPECT_EQ(engine_->Reshare(s, "G", "E1", rng_).size(), 44426u);
}

TEST_P(EngineTest, RevealCharges) {
  const ShareSet s = engine_->Share(FixedVec(5), "E3", rng_);
  auto before = engine_->meter().totals();
  engine_->Reveal(s, Receiver::Member(engine_->party_set("E3"), 1));
  EXPECT_EQ((engine_->meter().totals() - before).bytes, 2u * 5 * 8);
  before = engine_->meter().totals();
  engine_->Reveal(s, Receiver::Client(3));
  EXPECT_EQ((engine_->meter().totals() - before).bytes, 3u * 5 * 8);
  before = engine_->meter().totals();
  engine_->Reveal(s, Receiver::Metrics());
  EXPECT_EQ(engine_->meter().totals() - before, CostMeter::Totals{});
  EXPECT_EQ(engine_->reveal_log().size(), 3u);
}

TEST_P(EngineTest, AdditiveHomomorphismIsFree) {
  const FixedVec x = RandomVec(rng_, 50);
  const FixedVec y = RandomVec(rng_, 50);
  const ShareSet a = engine_->Share(x, "G", rng_);
  const ShareSet b = engine_->Share(y, "G", rng_);
  const auto before = engine_->meter().totals();
  const ShareSet c = engine_->Add(a, b);
  EXPECT_EQ(engine_->meter().totals() - before, CostMeter::Totals{});
  EXPECT_EQ(engine_->Reveal(c, Receiver::Metrics()), ring::AddWrap(x, y));
}

TEST_P(EngineTest, LocalOpsRejectMismatch) {
  const ShareSet a = engine_->Share(FixedVec(3), "G", rng_);
  const ShareSet b = engine_->Share(FixedVec(4), "G", rng_);
  const ShareSet c = engine_->Share(FixedVec(3), "E1", rng_);
  EXPECT_THROW(engine_->Add(a, b), ShapeError);
  EXPECT_THROW(engine_->Add(a, c), SharingError);
}

TEST_P(EngineTest, ScalarMulWithinTruncationUlp) {
  const FixedVec x = RandomVec(rng_, 200);
  const ShareSet a = engine_->Share(x, "G", rng_);
  const auto c = Encode(0.37);
  const auto before = engine_->meter().totals();
  const FixedVec got = engine_->Reveal(engine_->ScalarMul(c, a), Receiver::Metrics());
  EXPECT_EQ(engine_->meter().totals() - before, CostMeter::Totals{});
  const FixedVec want = ring::ScaleTruncate(c, x);
  for (size_t i = 0; i < x.size(); ++i) {
    const int64_t d = ring::AsSigned(got[i]) - ring::AsSigned(want[i]);
    if (multiparty()) {
      EXPECT_LE(std::abs(d), 1);
    } else {
      EXPECT_EQ(d, 0);
    }
  }
  const FixedVec id = engine_->Reveal(engine_->ScalarMul(Encode(1.0), a),
                                      Receiver::Metrics());
  for (size_t i = 0; i < x.size(); ++i) {
    EXPECT_LE(std::abs(ring::AsSigned(id[i]) - ring::AsSigned(x[i])), 1);
  }
}

TEST_P(EngineTest, ScalarMulInLargerCommitteePaysOneOpening) {
  const FixedVec x = RandomVec(rng_, 40);
  const ShareSet a = engine_->Share(x, "E3", rng_);
  const auto c = Encode(-1.75);
  const auto before = engine_->meter().totals();
  const FixedVec got = engine_->Reveal(engine_->ScalarMul(c, a), Receiver::Metrics());
  const auto delta = engine_->meter().totals() - before;
  const FixedVec want = ring::ScaleTruncate(c, x);
  for (size_t i = 0; i < x.size(); ++i) {
    EXPECT_LE(std::abs(ring::AsSigned(got[i]) - ring::AsSigned(want[i])),
              multiparty() ? 1 : 0);
  }
  EXPECT_EQ(delta.bytes, 6u * 40 * 8);
  EXPECT_EQ(delta.rounds, 1u);
}

TEST_P(EngineTest, ChainedLinearOpsMatchPlaintextPipeline) {
  const FixedVec x = RandomVec(rng_, 64);
  const FixedVec y = RandomVec(rng_, 64);
  const FixedVec k = RandomVec(rng_, 64);
  ShareSet a = engine_->Share(x, "G", rng_);
  const ShareSet b = engine_->Share(y, "G", rng_);
  FixedVec plain = x;
  // Ten ring-exact linear steps.
  for (int step = 0; step < 10; ++step) {
    switch (step % 4) {
      case 0:
        a = engine_->Add(a, b);
        plain = ring::AddWrap(plain, y);
        break;
      case 1:
        a = engine_->ScaleInt(3, a);
        for (auto& v : plain.raw()) v *= 3;
        break;
      case 2:
        a = engine_->AddPublic(a, k);
        plain = ring::AddWrap(plain, k);
        break;
      default:
        a = engine_->Sub(a, b);
        plain = ring::SubWrap(plain, y);
    }
  }
  EXPECT_EQ(engine_->Reveal(a, Receiver::Metrics()), plain);
}

TEST_P(EngineTest, WeightedSumMatchesPlaintext) {
  // reveal(sum_k c_k * share(x_k)) vs the plaintext fixed-point evaluation.
  std::vector<FixedVec> xs;
  std::vector<ring::FixedScalar> cs;
  for (int k = 0; k < 10; ++k) {
    xs.push_back(RandomVec(rng_, 32));
    cs.push_back(Encode(rng_.Uniform(0.0, 0.2)));
  }
  ShareSet acc = engine_->PublicConstant(FixedVec(32), "G");
  FixedVec plain(32);
  for (int k = 0; k < 10; ++k) {
    acc = engine_->Add(acc, engine_->ScalarMul(cs[k], engine_->Share(xs[k], "G", rng_)));
    plain = ring::AddWrap(plain, ring::ScaleTruncate(cs[k], xs[k]));
  }
  const FixedVec got = engine_->Reveal(acc, Receiver::Metrics());
  for (size_t i = 0; i < 32; ++i) {
    const int64_t d = ring::AsSigned(got[i]) - ring::AsSigned(plain[i]);
    EXPECT_LE(std::abs(d), multiparty() ? 10 : 0);
  }
}

TEST_P(EngineTest, BeaverMulBasics) {
  const auto one = [&](double v) {
    return engine_->Share(FixedVec::Encode(std::vector<double>{v}), "G", rng_);
  };
  EXPECT_EQ(engine_->Reveal(engine_->BeaverMul(one(2.0), one(3.0)),
                            Receiver::Metrics()).Decode()[0], 6.0);
  EXPECT_EQ(engine_->Reveal(engine_->BeaverMul(one(-7.25), one(0.0)),
                            Receiver::Metrics()).Decode()[0], 0.0);
}

TEST_P(EngineTest, BeaverMulMatchesPlaintextAndCharges) {
  const FixedVec x = RandomVec(rng_, 100);
  const FixedVec y = RandomVec(rng_, 100);
  const ShareSet a = engine_->Share(x, "E3", rng_);
  const ShareSet b = engine_->Share(y, "E3", rng_);
  const auto before = engine_->meter().totals();
  const FixedVec got = engine_->Reveal(engine_->BeaverMul(a, b), Receiver::Metrics());
  const auto delta = engine_->meter().totals() - before;
  const FixedVec want = ring::MulTruncate(x, y);
  for (size_t i = 0; i < 100; ++i) {
    const int64_t d = ring::AsSigned(got[i]) - ring::AsSigned(want[i]);
    EXPECT_LE(std::abs(d), multiparty() ? 2 : 0);
  }
  // Three members: masked-truncation opening adds one round and one more
  // opening of 100 elements per ordered pair.
  EXPECT_EQ(delta.rounds, 2u);
  EXPECT_EQ(delta.beaver_triples, 100u);
  EXPECT_EQ(delta.bytes, 6u * 2 * 100 * 8 + 6u * 100 * 8);

  // Integer mode is exact in both backends.
  const ShareSet ia = engine_->Share(FixedVec(std::vector<uint64_t>{3, 0 - 4ull}, 22), "G", rng_);
  const ShareSet ib = engine_->Share(FixedVec(std::vector<uint64_t>{5, 6}, 22), "G", rng_);
  EXPECT_EQ(engine_->Reveal(engine_->BeaverMul(ia, ib, MulMode::kInteger),
                            Receiver::Metrics()).raw(),
            (std::vector<uint64_t>{15, 0 - 24ull}));
}

TEST_P(EngineTest, DealerExhaustion) {
  EngineOptions options;
  options.triple_budget = 10;
  auto engine = MakeEngine(GetParam(), options);
  engine->RegisterPartySet({"G", 2});
  const ShareSet a = engine->Share(FixedVec(6), "G", rng_);
  EXPECT_NO_THROW(engine->BeaverMul(a, a));
  EXPECT_THROW(engine->BeaverMul(a, a), SharingError);
}

TEST_P(EngineTest, CompareExchangeOrdersPairs) {
  ShareSet lo = engine_->Share(FixedVec::Encode(std::vector<double>{5.0, 3.0, -1.0}), "G", rng_);
  ShareSet hi = engine_->Share(FixedVec::Encode(std::vector<double>{3.0, 3.0, 2.0}), "G", rng_);
  ShareSet lp = engine_->Share(FixedVec(std::vector<uint64_t>{1, 1, 1}, 22), "G", rng_);
  ShareSet hp = engine_->Share(FixedVec(std::vector<uint64_t>{2, 2, 2}, 22), "G", rng_);
  std::array<ShareSet*, 1> lps{&lp}, hps{&hp};
  const auto before = engine_->meter().totals();
  engine_->CompareExchange(lo, hi, lps, hps, rng_);
  const auto delta = engine_->meter().totals() - before;
  EXPECT_EQ(engine_->Reveal(lo, Receiver::Metrics()).Decode(),
            (std::vector<double>{3.0, 3.0, -1.0}));
  EXPECT_EQ(engine_->Reveal(hi, Receiver::Metrics()).Decode(),
            (std::vector<double>{5.0, 3.0, 2.0}));
  EXPECT_EQ(engine_->Reveal(lp, Receiver::Metrics()).raw(), (std::vector<uint64_t>{2, 1, 1}));
  EXPECT_EQ(engine_->Reveal(hp, Receiver::Metrics()).raw(), (std::vector<uint64_t>{1, 2, 2}));
  EXPECT_EQ(delta.comparisons, 3u);
  EXPECT_EQ(delta.rounds, 7u + 1u);
  EXPECT_EQ(delta.beaver_triples, 6u);
  EXPECT_EQ(delta.bytes, 3u * 64 + 2u * 2 * 6 * 8);
}

TEST_P(EngineTest, TallyComparisonsCountedSeparately) {
  ShareSet lo = engine_->Share(FixedVec(4), "G", rng_);
  ShareSet hi = engine_->Share(FixedVec(4), "G", rng_);
  engine_->CompareExchange(lo, hi, rng_, CompareKind::kTally);
  EXPECT_EQ(engine_->meter().totals().comparisons, 0u);
  EXPECT_EQ(engine_->meter().totals().tally_comparisons, 4u);
}

TEST_P(EngineTest, SingleShareLooksUniform) {
  // Chi-square on the low-order byte of party 0's share, 1000 sharings of a
  // fixed secret; 255 degrees of freedom, critical value 310.46 at 0.01.
  const FixedVec x = FixedVec::Encode(std::vector<double>{42.0});
  std::array<int, 256> counts{};
  for (int t = 0; t < 1000; ++t) {
    const ShareSet s = engine_->Share(x, "G", rng_);
    ++counts[s.share(0)[0] & 0xff];
  }
  const double expected = 1000.0 / 256.0;
  double chi2 = 0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 310.46);
}

TEST_P(EngineTest, PartySetValidation) {
  EXPECT_THROW(engine_->RegisterPartySet({"G", 2}), SharingError);
  EXPECT_THROW(engine_->RegisterPartySet({"X", 1}), SharingError);
  EXPECT_THROW(engine_->Share(FixedVec(1), "nowhere", rng_), SharingError);
}

INSTANTIATE_TEST_SUITE_P(Backends, EngineTest,
                         ::testing::Values(Backend::kSimulation, Backend::kMultiParty),
                         [](const auto& info) {
                           return info.param == Backend::kSimulation ? "Simulation"
                                                                     : "MultiParty";
                         });

// Both backends must agree on every counter for the same operation sequence.
TEST(BackendParity, IdenticalMeterTotalsAndExactResults) {
  std::array<CostMeter::Totals, 2> totals;
  std::array<std::vector<uint64_t>, 2> results;
  for (int b = 0; b < 2; ++b) {
    auto engine = MakeEngine(b == 0 ? Backend::kSimulation : Backend::kMultiParty, {});
    engine->RegisterPartySet({"G", 2});
    engine->RegisterPartySet({"E1", 3});
    Rng rng(3);
    const FixedVec x = FixedVec::Encode(std::vector<double>{1.5, -2.0, 7.0, 0.25});
    const FixedVec y = FixedVec::Encode(std::vector<double>{4.0, 0.5, -3.0, 8.0});
    ShareSet a = engine->Share(x, "E1", rng);
    ShareSet c = engine->Reshare(a, "E1", "G", rng);
    ShareSet d = engine->Share(y, "G", rng);
    engine->CompareExchange(c, d, rng);
    const ShareSet e = engine->BeaverMul(c, d, MulMode::kInteger);
    ShareSet f = engine->Share(x, "E1", rng);
    engine->BeaverMul(f, f);
    const FixedVec out = engine->Reveal(engine->Add(e, c), Receiver::Member(engine->party_set("G"), 0));
    totals[b] = engine->meter().totals();
    results[b] = out.raw();
  }
  EXPECT_EQ(totals[0], totals[1]);
  EXPECT_EQ(results[0], results[1]);
}

TEST(LocalTruncate, TwoPartyWithinOneUlp) {
  Rng rng(8);
  for (int t = 0; t < 10000; ++t) {
    const int64_t v = static_cast<int64_t>(rng.Below(uint64_t{1} << 50)) - (int64_t{1} << 49);
    const uint64_t r = rng.NextU64();
    const uint64_t s0 = r, s1 = static_cast<uint64_t>(v) - r;
    const uint64_t got = LocalTruncateShare(s0, 0, 22) + LocalTruncateShare(s1, 1, 22);
    EXPECT_LE(std::abs(ring::AsSigned(got) - (v >> 22)), 1);
  }
}

}  // namespace
}  // namespace hyfl::mpc
