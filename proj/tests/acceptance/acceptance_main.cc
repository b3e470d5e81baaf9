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

// Acceptance checks: one PASS/FAIL line per criterion.
//
//   acceptance [--out DIR] [--only 3,10]
//
// Training runs write their artifacts under DIR. Exit status is 0 when
// every selected criterion passes.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "hyfl/agg/aggregators.h"
#include "hyfl/attacks/attacks.h"
#include "hyfl/cli/scenarios.h"
#include "hyfl/core/metrics.h"
#include "hyfl/core/orchestrator.h"
#include "hyfl/mpc/sharing_engine.h"
#include "hyfl/nn/trainer.h"

namespace {

namespace fs = std::filesystem;
using namespace hyfl;
using ring::FixedVec;

struct Outcome {
  bool passed = false;
  std::string detail;
};

fs::path g_out = "acceptance_artifacts";

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::unique_ptr<mpc::SharingEngine> Engine(mpc::Backend backend, uint64_t seed) {
  auto e = mpc::MakeEngine(backend, mpc::EngineOptions{seed, mpc::CostModel{}, UINT64_MAX});
  e->RegisterPartySet(mpc::PartySet{"G", 2});
  return e;
}

const core::Datasets& DeskData() {
  static const core::Datasets d = core::LoadDatasets(core::DefaultConfig(core::Mode::kHyFL));
  return d;
}

core::TrainingResult RunAndSave(const core::RunConfig& c, const std::string& dir) {
  std::cerr << fmt::format("  running {} ({} rounds)\n", dir, c.rounds) << std::flush;
  const auto start = std::chrono::steady_clock::now();
  core::TrainingResult r = core::RunTraining(c, DeskData());
  core::WriteRunArtifacts(r, g_out / dir);
  std::cerr << fmt::format("  {} done in {:.0f} s, final accuracy {:.4f}\n", dir, Seconds(start),
                           r.metrics.empty() ? 0.0 : r.metrics.back().accuracy)
            << std::flush;
  return r;
}

// 1. reveal(share(x)) == x on raw ring values.
Outcome SharingCorrectness() {
  const auto start = std::chrono::steady_clock::now();
  size_t checked = 0;
  for (auto backend : {mpc::Backend::kSimulation, mpc::Backend::kMultiParty}) {
    auto e = Engine(backend, 101);
    Rng rng(202);
    for (int i = 0; i < 10000; ++i) {
      std::vector<uint64_t> raw(100);
      for (auto& v : raw) v = rng.NextU64();
      const FixedVec x(raw, ring::kDefaultFracBits);
      if (e->Reveal(e->Share(x, "G", rng), mpc::Receiver::Metrics()).raw() != raw) {
        return {false, fmt::format("mismatch at vector {}", i)};
      }
      ++checked;
    }
  }
  const double secs = Seconds(start);
  return {secs < 10.0,
          fmt::format("{} vectors of length 100 over both engines, exact, {:.2f} s", checked, secs)};
}

// 2. FedAvg over 10 shared LeNet-size models costs nothing.
Outcome LinearOpsFree() {
  const size_t gamma = nn::Architecture::LeNet().param_count();
  auto e = Engine(mpc::Backend::kSimulation, 3);
  Rng rng(4);
  std::vector<mpc::ShareSet> updates;
  for (int i = 0; i < 10; ++i) {
    std::vector<double> v(gamma);
    for (auto& x : v) x = rng.Uniform(-0.1, 0.1);
    updates.push_back(e->Share(FixedVec::Encode(v), "G", rng));
  }
  const auto before = e->meter().totals();
  agg::SharedDomain d(*e, "G", rng);
  const auto avg = agg::FedAvg(d, updates);
  const auto spent = e->meter().totals() - before;
  return {spent.bytes == 0 && spent.rounds == 0 && avg.size() == gamma,
          fmt::format("gamma {}, {} bytes, {} rounds", gamma, spent.bytes, spent.rounds)};
}

// Runs q2-backend into `dir` and returns the per-label metrics CSV bytes.
std::map<std::string, std::string> RunBackendScenario(const fs::path& dir,
                                                      cli::ScenarioReport* report) {
  cli::ScenarioOptions o;
  *report = cli::RunScenario("q2-backend", o, dir, std::cerr);
  std::map<std::string, std::string> out;
  for (const auto& label : report->labels) out[label] = ReadFile(dir / label / "metrics.csv");
  out["curves"] = ReadFile(dir / "curves.csv");
  return out;
}

std::map<std::string, std::string> g_backend_csv;

// 3. Fixed-point training tracks float training.
Outcome FixedPointFidelity() {
  const auto start = std::chrono::steady_clock::now();
  cli::ScenarioReport report;
  g_backend_csv = RunBackendScenario(g_out / "q2-backend", &report);
  const auto& fl = report.results.at(0);
  const auto& fx = report.results.at(1);
  if (fl.config.backend != core::ExperimentBackend::kFloat ||
      fx.config.backend != core::ExperimentBackend::kFixed) {
    return {false, "unexpected preset layout"};
  }
  double worst = 0;
  int worst_round = 0;
  for (size_t t = 10; t <= fl.metrics.size(); t += 10) {
    const double gap = std::abs(fl.metrics[t - 1].accuracy - fx.metrics[t - 1].accuracy) * 100;
    if (gap > worst) {
      worst = gap;
      worst_round = static_cast<int>(t);
    }
  }
  const double secs = Seconds(start);
  return {fl.metrics.size() == 100 && worst <= 1.0 && secs < 15 * 60,
          fmt::format("max gap {:.2f} pp (round {}), final float {:.4f} fixed {:.4f}, {:.0f} s",
                      worst, worst_round, fl.metrics.back().accuracy,
                      fx.metrics.back().accuracy, secs)};
}

// Worst relative error of the analytic gradient against central
// differences, over every parameter.
double WorstGradientError(const nn::Architecture& arch, uint64_t seed, size_t n) {
  Rng rng(seed);
  const nn::Model m = nn::Model::Initialize(arch, rng);
  const size_t d = arch.input_shape().size();
  const int classes = arch.num_classes();
  std::vector<float> x(n * d);
  for (auto& v : x) v = static_cast<float>(rng.Uniform(-1, 1));
  nn::Examples ex;
  ex.sample_size = d;
  for (size_t i = 0; i < n; ++i) ex.Add(x.data() + i * d, static_cast<int>(rng.Below(classes)));
  const auto g = nn::Gradient(m, ex).gradient;
  double worst = 0;
  const double h = 1e-5;
  for (size_t p = 0; p < m.param_count(); ++p) {
    auto plus = m.float_params(), minus = m.float_params();
    plus[p] += h;
    minus[p] -= h;
    const double fd =
        (nn::MeanLoss(nn::Model(arch, plus), ex) - nn::MeanLoss(nn::Model(arch, minus), ex)) /
        (2 * h);
    const double scale = std::max({std::abs(fd), std::abs(g[p]), 1e-7});
    worst = std::max(worst, std::abs(fd - g[p]) / scale);
  }
  return worst;
}

// 4. Backprop against finite differences.
Outcome GradientChecks() {
  const auto dense = nn::Architecture::Parse(
      "input(1,1,7) dense(7,6) relu dense(6,4) softmax_ce");
  const auto conv = nn::Architecture::Parse(
      "input(1,6,6) conv2d(1,2,3,1) relu flatten dense(32,3) softmax_ce");
  double dense_worst = 0, conv_worst = 0;
  for (uint64_t s = 0; s < 20; ++s) {
    dense_worst = std::max(dense_worst, WorstGradientError(dense, 1000 + s, 5));
    conv_worst = std::max(conv_worst, WorstGradientError(conv, 2000 + s, 4));
  }
  return {dense_worst < 1e-4 && conv_worst < 1e-3,
          fmt::format("20 seeds, dense max {:.2e}, conv max {:.2e}", dense_worst, conv_worst)};
}

// 5. Sorting network sizes.
Outcome NetworkCounts() {
  const size_t a = agg::BuildSortingNetwork(10).size();
  const size_t b = agg::BuildSortingNetwork(100).size();
  return {a == 31 && b == 1077, fmt::format("n=10: {}, n=100: {}", a, b)};
}

// 6. Oblivious TM equals plaintext sort-and-trim on ring values.
Outcome TrimmedMeanOracle() {
  const auto start = std::chrono::steady_clock::now();
  auto e = Engine(mpc::Backend::kSimulation, 6);
  Rng rng(66);
  const size_t m = 10, gamma = 50, alpha = 2;
  const uint64_t inv = ring::Encode(1.0 / static_cast<double>(m - 2 * alpha)).raw;
  for (int inst = 0; inst < 100; ++inst) {
    std::vector<std::vector<int64_t>> cols(gamma);
    std::vector<mpc::ShareSet> shared;
    std::set<int64_t> seen;
    for (size_t i = 0; i < m; ++i) {
      std::vector<uint64_t> raw(gamma);
      for (size_t j = 0; j < gamma; ++j) {
        int64_t v;
        do {
          v = static_cast<int64_t>(rng.Below(1ull << 26)) - (1ll << 25);
        } while (!seen.insert(v).second);
        raw[j] = static_cast<uint64_t>(v);
        cols[j].push_back(v);
      }
      shared.push_back(e->Share(FixedVec(raw, ring::kDefaultFracBits), "G", rng));
    }
    agg::SharedDomain d(*e, "G", rng);
    const FixedVec got = e->Reveal(agg::TrimmedMean(d, shared, alpha), mpc::Receiver::Metrics());
    for (size_t j = 0; j < gamma; ++j) {
      std::sort(cols[j].begin(), cols[j].end());
      uint64_t sum = 0;
      for (size_t k = alpha; k < m - alpha; ++k) sum += static_cast<uint64_t>(cols[j][k]);
      if (got[j] != ring::MulTruncateRaw(sum, inv, ring::kDefaultFracBits)) {
        return {false, fmt::format("instance {} coordinate {} differs", inst, j)};
      }
    }
  }
  const double secs = Seconds(start);
  return {secs < 60, fmt::format("100 instances (m=10, gamma=50) bit-exact, {:.2f} s", secs)};
}

// 7. The variant excludes exactly 2*alpha models, always the planted one.
Outcome VariantExclusion() {
  size_t bad_count = 0, missed = 0;
  const int trials = 50;
  for (int s = 0; s < trials; ++s) {
    auto e = Engine(mpc::Backend::kSimulation, 700 + s);
    Rng rng(800 + s);
    const size_t m = 10, gamma = 300;
    const size_t planted = rng.Below(m);
    std::vector<mpc::ShareSet> updates;
    std::vector<uint64_t> ids;
    for (size_t i = 0; i < m; ++i) {
      std::vector<double> v(gamma);
      for (auto& x : v) x = i == planted ? 50.0 + rng.Uniform(0, 1) : rng.Normal();
      updates.push_back(e->Share(FixedVec::Encode(v), "G", rng));
      ids.push_back(100 + i);
    }
    agg::SharedDomain d(*e, "G", rng);
    const auto out = agg::TmVariant(d, updates, ids, 2, 100, 900 + s);
    if (out.excluded_ids.size() != 4) ++bad_count;
    if (std::find(out.excluded_ids.begin(), out.excluded_ids.end(), 100 + planted) ==
        out.excluded_ids.end()) {
      ++missed;
    }
  }
  return {bad_count == 0 && missed == 0,
          fmt::format("{} trials: {} with |excluded| != 4, planted outlier missed {} times",
                      trials, bad_count, missed)};
}

// 8. Comparison counts of the variant vs TM at LeNet size.
Outcome VariantCostReduction() {
  const size_t gamma = nn::Architecture::LeNet().param_count();
  auto e = Engine(mpc::Backend::kSimulation, 8);
  Rng rng(88);
  std::vector<mpc::ShareSet> updates;
  std::vector<uint64_t> ids;
  for (int i = 0; i < 10; ++i) {
    std::vector<double> v(gamma);
    for (auto& x : v) x = rng.Uniform(-0.05, 0.05);
    updates.push_back(e->Share(FixedVec::Encode(v), "G", rng));
    ids.push_back(static_cast<uint64_t>(i));
  }
  agg::SharedDomain d(*e, "G", rng);
  auto before = e->meter().totals();
  agg::TmVariant(d, updates, ids, 2, 100, 5);
  const auto variant = e->meter().totals() - before;
  before = e->meter().totals();
  agg::TrimmedMean(d, updates, 2);
  const auto tm = e->meter().totals() - before;
  const bool exact = variant.comparisons * gamma == tm.comparisons * 100;
  const double ratio = static_cast<double>(tm.comparisons) / static_cast<double>(variant.comparisons);
  return {exact && ratio > 400,
          fmt::format("gamma {}: TM {} vs variant {} comparisons ({:.1f}x fewer), bytes {} vs {}",
                      gamma, tm.comparisons, variant.comparisons, ratio, tm.bytes, variant.bytes)};
}

// 9. Label-flip formulas.
Outcome AttackFormulas() {
  std::vector<std::string> failures;
  // SLF.
  data::ClientShard s;
  s.labels = {3, 0, 1, 2, 4, 5, 6, 7, 8, 9};
  s.indices.resize(10);
  const auto original = s.labels;
  attacks::PoisonSlf(s, 10);
  if (s.labels[0] != 6) failures.push_back("slf 3->6");
  for (size_t i = 0; i < 10; ++i) {
    if (s.labels[i] != 9 - original[i]) failures.push_back("slf formula");
  }
  attacks::PoisonSlf(s, 10);
  if (s.labels != original) failures.push_back("slf involution");
  // TLF.
  s.labels = original;
  attacks::PoisonTlf(s, 0, 1);
  for (size_t i = 0; i < 10; ++i) {
    const int want = original[i] == 0 ? 1 : original[i];
    if (s.labels[i] != want) failures.push_back("tlf");
  }
  // RLF: chi-square over distinct samples, 9 degrees of freedom at 0.01.
  data::Dataset d;
  d.sample_shape = {1, 1, 1};
  const size_t n = 100000;
  data::ClientShard r;
  for (size_t i = 0; i < n; ++i) {
    d.features.push_back(static_cast<float>(i));
    d.labels.push_back(0);
    r.indices.push_back(static_cast<uint32_t>(i));
    r.labels.push_back(0);
  }
  attacks::PoisonRlf(r, d, 10, 1234);
  std::vector<double> counts(10, 0);
  for (int l : r.labels) counts[l] += 1;
  double chi2 = 0;
  for (double c : counts) chi2 += (c - n / 10.0) * (c - n / 10.0) / (n / 10.0);
  if (chi2 >= 21.666) failures.push_back(fmt::format("rlf chi2 {:.2f}", chi2));
  // DLF on a separable two-class set.
  data::Dataset toy;
  toy.sample_shape = {1, 1, 1};
  toy.num_classes = 2;
  Rng rng(9);
  std::vector<data::ClientShard> shards(2);
  for (uint32_t i = 0; i < 200; ++i) {
    const int label = static_cast<int>(i % 2);
    toy.features.push_back(static_cast<float>((label ? 2.0 : -2.0) + rng.Uniform(-0.5, 0.5)));
    toy.labels.push_back(label);
    shards[i % 3 == 0 ? 0 : 1].indices.push_back(i);
    shards[i % 3 == 0 ? 0 : 1].labels.push_back(label);
  }
  nn::TrainSpec spec = attacks::DefaultSurrogateSpec();
  spec.epochs = 20;
  attacks::PoisonDlf({&shards[0], &shards[1]}, toy,
                     nn::Architecture::Parse("input(1,1,1) dense(1,2) softmax_ce"), spec, 3);
  size_t inverted = 0;
  for (const auto& sh : shards) {
    for (size_t i = 0; i < sh.size(); ++i) inverted += sh.labels[i] == 1 - toy.labels[sh.indices[i]];
  }
  if (inverted != 200) failures.push_back(fmt::format("dlf inverted {}/200", inverted));
  std::string detail = fmt::format("rlf chi2 {:.2f} < 21.666, dlf inverted {}/200", chi2, inverted);
  for (const auto& f : failures) detail += "; FAILED " + f;
  return {failures.empty(), detail};
}

core::RunConfig FlatDesk(uint64_t seed) {
  core::RunConfig c = cli::DeskConfig(core::Mode::kFlatSingle);
  c.seed = seed;
  return c;
}

// 10. Focused DLF at 0.2 hurts FedAvg, TM recovers at least half.
Outcome AttackImpact() {
  const auto start = std::chrono::steady_clock::now();
  double clean = 0, attacked = 0, defended = 0;
  const uint64_t seeds[] = {1, 2, 3};
  for (uint64_t seed : seeds) {
    core::RunConfig c = FlatDesk(seed);
    clean += RunAndSave(c, fmt::format("attack-impact/clean-fedavg-s{}", seed))
                 .metrics.back().accuracy;
    c.attack.kind = attacks::AttackKind::kDlf;
    c.attack.poison_rate = 0.2;
    c.attack.placement = attacks::Placement::kFocused;
    attacked += RunAndSave(c, fmt::format("attack-impact/dlf-fedavg-s{}", seed))
                    .metrics.back().accuracy;
    c.agg.kind = agg::AggregatorKind::kTrimmedMean;
    defended += RunAndSave(c, fmt::format("attack-impact/dlf-tm-s{}", seed))
                    .metrics.back().accuracy;
  }
  clean /= 3;
  attacked /= 3;
  defended /= 3;
  const double gap = (clean - attacked) * 100;
  const double recovered = (defended - attacked) * 100;
  const double secs = Seconds(start);
  return {gap >= 5.0 && recovered >= gap / 2 && secs < 3600,
          fmt::format("round-100 mean accuracy: clean {:.4f}, DLF FedAvg {:.4f}, DLF TM {:.4f}; "
                      "gap {:.2f} pp, recovered {:.2f} pp, {:.0f} s",
                      clean, attacked, defended, gap, recovered, secs)};
}

// 11. HyFL converges at least as fast as flat FL.
Outcome ConvergenceDirection() {
  cli::ScenarioOptions o;
  const auto report = cli::RunScenario("q1-convergence", o, g_out / "q1-convergence", std::cerr);
  const auto& hyfl = report.results.at(0).metrics;
  const auto& flat = report.results.at(1).metrics;
  if (report.labels.at(0) != "hyfl" || report.labels.at(1) != "flat") {
    return {false, "unexpected preset layout"};
  }
  int ahead = 0, total = 0;
  for (size_t t = 10; t <= std::min(hyfl.size(), flat.size()); ++t) {
    ++total;
    ahead += hyfl[t - 1].accuracy >= flat[t - 1].accuracy ? 1 : 0;
  }
  const double share = total ? static_cast<double>(ahead) / total : 0.0;
  return {total == 91 && share >= 0.8,
          fmt::format("HyFL >= flat in {}/{} rounds 10-100 ({:.0f}%), final {:.4f} vs {:.4f}",
                      ahead, total, share * 100, hyfl.back().accuracy, flat.back().accuracy)};
}

// 12. Same seed, byte-identical CSVs.
Outcome Determinism() {
  if (g_backend_csv.empty()) {
    cli::ScenarioReport first;
    g_backend_csv = RunBackendScenario(g_out / "q2-backend", &first);
  }
  cli::ScenarioReport second;
  const auto again = RunBackendScenario(g_out / "q2-backend-rerun", &second);
  size_t identical = 0;
  for (const auto& [label, csv] : g_backend_csv) {
    if (again.count(label) && again.at(label) == csv && !csv.empty()) ++identical;
  }
  return {identical == g_backend_csv.size() && identical == 3,
          fmt::format("q2-backend twice: {}/{} CSV files byte-identical", identical,
                      g_backend_csv.size())};
}

// 13. FLTrust trust scores and a hand-computed combination.
Outcome FlTrustProperties() {
  const std::vector<double> root = {1.5, -2.0, 0.5};
  const auto r = agg::FlTrustCombine(root, {{3.0, -4.0, 1.0}, {2.0, 1.0, -2.0}, {-1.5, 2.0, -0.5}});
  const double s0 = r.scores[0], s1 = r.scores[1], s2 = r.scores[2];
  const bool scores = std::abs(s0 - 1) < 1e-9 && std::abs(s1) < 1e-9 && std::abs(s2) < 1e-9;
  // Root (3,4), |root| = 5. g1 = (6,8): cos 1, rescaled (3,4). g2 = (4,-3):
  // cos 0. g3 = (0,2): cos 16/20 = 0.8, rescaled (0,5). Output
  // ((3,4) + 0.8 * (0,5)) / 1.8 = (5/3, 40/9).
  const auto c = agg::FlTrustCombine({3, 4}, {{6, 8}, {4, -3}, {0, 2}});
  const bool closed = std::abs(c.output[0] - 5.0 / 3.0) < 1e-6 &&
                      std::abs(c.output[1] - 40.0 / 9.0) < 1e-6 &&
                      std::abs(c.scores[2] - 0.8) < 1e-6;
  return {scores && closed,
          fmt::format("scores {:.3g}/{:.3g}/{:.3g}; closed form ({:.6f}, {:.6f}) vs (1.666667, "
                      "4.444444)",
                      s0, s1, s2, c.output[0], c.output[1])};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HyFL acceptance checks"};
  std::string out = "acceptance_artifacts";
  std::vector<int> only;
  app.add_option("--out", out, "Artifact directory");
  app.add_option("--only", only, "Criteria to run (default: all)")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  g_out = out;
  fs::create_directories(g_out);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"sharing correctness", SharingCorrectness},
      {"linear ops cost nothing", LinearOpsFree},
      {"fixed-point fidelity", FixedPointFidelity},
      {"gradient checks", GradientChecks},
      {"sorting network counts", NetworkCounts},
      {"TM oracle equivalence", TrimmedMeanOracle},
      {"TM variant exclusion", VariantExclusion},
      {"TM variant comparison reduction", VariantCostReduction},
      {"attack formulas", AttackFormulas},
      {"attack impact direction", AttackImpact},
      {"HyFL vs flat FL convergence", ConvergenceDirection},
      {"determinism", Determinism},
      {"FLTrust properties", FlTrustProperties},
  };

  int failed = 0;
  std::string summary;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const std::string line = fmt::format("{} {:2d} {}: {} [{:.1f} s]", o.passed ? "PASS" : "FAIL",
                                         id, criteria[i].first, o.detail, Seconds(start));
    std::cout << line << std::endl;
    summary += line + "\n";
    failed += o.passed ? 0 : 1;
  }
  std::ofstream(g_out / "acceptance.txt") << summary;
  return failed == 0 ? 0 : 1;
}
