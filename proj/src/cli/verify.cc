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

#include "hyfl/cli/verify.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "hyfl/agg/aggregators.h"
#include "hyfl/attacks/attacks.h"
#include "hyfl/core/config.h"
#include "hyfl/mpc/sharing_engine.h"
#include "hyfl/nn/trainer.h"

namespace hyfl::cli {
namespace {

using ring::FixedVec;

std::unique_ptr<mpc::SharingEngine> Engine(mpc::Backend backend, uint64_t seed) {
  auto e = mpc::MakeEngine(backend, mpc::EngineOptions{seed, mpc::CostModel{}, UINT64_MAX});
  e->RegisterPartySet(mpc::PartySet{"G", 2});
  return e;
}

FixedVec RandomRaw(Rng& rng, size_t n) {
  std::vector<uint64_t> raw(n);
  for (auto& v : raw) v = rng.NextU64();
  return FixedVec(std::move(raw), ring::kDefaultFracBits);
}

CheckResult ShareReveal(uint64_t seed) {
  for (auto backend : {mpc::Backend::kSimulation, mpc::Backend::kMultiParty}) {
    auto e = Engine(backend, seed);
    Rng rng(seed);
    for (int i = 0; i < 1000; ++i) {
      const FixedVec x = RandomRaw(rng, 100);
      if (e->Reveal(e->Share(x, "G", rng), mpc::Receiver::Metrics()) != x) {
        return {"", false, fmt::format("mismatch at vector {}", i)};
      }
    }
  }
  return {"", true, "1000 vectors x 2 backends"};
}

CheckResult FedAvgFree(uint64_t seed) {
  auto e = Engine(mpc::Backend::kSimulation, seed);
  Rng rng(seed);
  std::vector<mpc::ShareSet> updates;
  for (int i = 0; i < 10; ++i) updates.push_back(e->Share(RandomRaw(rng, 1000), "G", rng));
  const auto before = e->meter().totals();
  agg::SharedDomain d(*e, "G", rng);
  agg::FedAvg(d, updates);
  const auto spent = e->meter().totals() - before;
  return {"", spent.bytes == 0 && spent.rounds == 0, fmt::format("{} bytes", spent.bytes)};
}

CheckResult NetworkCounts(uint64_t) {
  const size_t a = agg::BuildSortingNetwork(10, agg::NetworkKind::kMergeExchange).size();
  const size_t b = agg::BuildSortingNetwork(100, agg::NetworkKind::kMergeExchange).size();
  return {"", a == 31 && b == 1077, fmt::format("n=10: {}, n=100: {}", a, b)};
}

CheckResult TrimmedMeanOracle(uint64_t seed) {
  auto e = Engine(mpc::Backend::kSimulation, seed);
  Rng rng(seed);
  const size_t m = 10, gamma = 20, alpha = 2;
  for (int inst = 0; inst < 10; ++inst) {
    std::vector<std::vector<double>> plain(m, std::vector<double>(gamma));
    std::vector<mpc::ShareSet> shared;
    for (auto& u : plain) {
      for (auto& v : u) v = rng.Uniform(-4, 4);
      shared.push_back(e->Share(FixedVec::Encode(u), "G", rng));
    }
    agg::SharedDomain d(*e, "G", rng);
    const FixedVec got =
        e->Reveal(agg::TrimmedMean(d, shared, alpha), mpc::Receiver::Metrics());
    const uint64_t inv = ring::Encode(1.0 / static_cast<double>(m - 2 * alpha)).raw;
    for (size_t j = 0; j < gamma; ++j) {
      std::vector<int64_t> col;
      for (auto& u : plain) col.push_back(ring::AsSigned(ring::EncodeRaw(u[j])));
      std::sort(col.begin(), col.end());
      uint64_t sum = 0;
      for (size_t k = alpha; k < m - alpha; ++k) sum += static_cast<uint64_t>(col[k]);
      if (got[j] != ring::MulTruncateRaw(sum, inv, ring::kDefaultFracBits)) {
        return {"", false, fmt::format("instance {} coordinate {}", inst, j)};
      }
    }
  }
  return {"", true, "10 instances bit-exact"};
}

CheckResult VariantExclusion(uint64_t seed) {
  Rng rng(seed);
  const size_t m = 10, gamma = 500;
  std::vector<std::vector<double>> updates(m, std::vector<double>(gamma));
  for (auto& u : updates) {
    for (auto& v : u) v = rng.Normal();
  }
  for (auto& v : updates[7]) v = 100.0;
  std::vector<uint64_t> ids(m);
  for (size_t i = 0; i < m; ++i) ids[i] = i;
  agg::PlainDomain d;
  const auto out = agg::TmVariant(d, updates, ids, 2, 100, seed);
  const bool planted = std::count(out.excluded_ids.begin(), out.excluded_ids.end(), 7) == 1;
  return {"", out.excluded_ids.size() == 4 && planted,
          fmt::format("{} excluded, planted outlier {}", out.excluded_ids.size(),
                      planted ? "excluded" : "kept")};
}

CheckResult LabelFlips(uint64_t) {
  data::ClientShard s;
  s.labels = {3, 0, 9, 1};
  attacks::PoisonSlf(s, 10);
  const bool slf = s.labels == std::vector<int>{6, 9, 0, 8};
  attacks::PoisonSlf(s, 10);
  const bool involution = s.labels == std::vector<int>{3, 0, 9, 1};
  attacks::PoisonTlf(s, 0, 1);
  const bool tlf = s.labels == std::vector<int>{3, 1, 9, 1};
  return {"", slf && involution && tlf, ""};
}

CheckResult FlTrustScores(uint64_t) {
  const std::vector<double> root = {1, 0, 0};
  const auto r = agg::FlTrustCombine(root, {{2, 0, 0}, {0, 3, 0}, {-1, 0, 0}});
  const bool ok = std::abs(r.scores[0] - 1) < 1e-9 && std::abs(r.scores[1]) < 1e-9 &&
                  std::abs(r.scores[2]) < 1e-9 && std::abs(r.output[0] - 1) < 1e-9;
  return {"", ok, fmt::format("scores {}, {}, {}", r.scores[0], r.scores[1], r.scores[2])};
}

CheckResult DenseGradient(uint64_t seed) {
  const auto arch = nn::Architecture::Parse("input(1,1,6) dense(6,5) relu dense(5,3) softmax_ce");
  Rng rng(seed);
  nn::Model model = nn::Model::Initialize(arch, rng);
  std::vector<float> x(4 * 6);
  for (auto& v : x) v = static_cast<float>(rng.Uniform(-1, 1));
  nn::Examples ex;
  ex.sample_size = 6;
  for (int i = 0; i < 4; ++i) ex.Add(x.data() + 6 * i, i % 3);
  const auto g = nn::Gradient(model, ex).gradient;
  double worst = 0;
  for (size_t p = 0; p < model.param_count(); ++p) {
    const double h = 1e-5;
    auto plus = model.float_params(), minus = model.float_params();
    plus[p] += h;
    minus[p] -= h;
    const double fd = (nn::MeanLoss(nn::Model(arch, plus), ex) -
                       nn::MeanLoss(nn::Model(arch, minus), ex)) /
                      (2 * h);
    const double scale = std::max({std::abs(fd), std::abs(g[p]), 1e-6});
    worst = std::max(worst, std::abs(fd - g[p]) / scale);
  }
  return {"", worst < 1e-4, fmt::format("max relative error {:.2e}", worst)};
}

CheckResult ConfigRoundTrip(uint64_t) {
  core::RunConfig c = core::DefaultConfig(core::Mode::kHyFL);
  c.train.learning_rate = 0.1 + 0.2;
  c.attack.kind = attacks::AttackKind::kDlf;
  c.attack.poison_rate = 0.2;
  const bool ok = core::ParseConfig(core::ToText(c)) == c;
  return {"", ok, ""};
}

}  // namespace

std::vector<CheckResult> RunVerification(uint64_t seed) {
  const std::pair<const char*, std::function<CheckResult(uint64_t)>> checks[] = {
      {"share-reveal-identity", ShareReveal},
      {"fedavg-zero-communication", FedAvgFree},
      {"sorting-network-counts", NetworkCounts},
      {"trimmed-mean-oracle", TrimmedMeanOracle},
      {"tm-variant-exclusion", VariantExclusion},
      {"label-flip-formulas", LabelFlips},
      {"fltrust-scores", FlTrustScores},
      {"dense-gradient", DenseGradient},
      {"config-roundtrip", ConfigRoundTrip},
  };
  std::vector<CheckResult> out;
  for (const auto& [name, fn] : checks) {
    CheckResult r;
    try {
      r = fn(seed);
    } catch (const std::exception& e) {
      r = {"", false, std::string("threw: ") + e.what()};
    }
    r.name = name;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace hyfl::cli
