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

#include "hyfl/cli/scenarios.h"

#include <fmt/format.h>

#include <chrono>

#include "hyfl/common/error.h"
#include "hyfl/core/metrics.h"

namespace hyfl::cli {
namespace {

using core::Mode;
using core::RunConfig;

constexpr int kDeskGridRounds = 20;

RunConfig Base(const ScenarioOptions& o, Mode mode) {
  RunConfig c = o.full_scale ? core::DefaultConfig(mode) : DeskConfig(mode);
  c.seed = o.seed;
  if (!o.data_dir.empty()) SetDataDir(c, o.data_dir);
  return c;
}

ScenarioRun Finish(std::string label, RunConfig c, const ScenarioOptions& o) {
  if (o.rounds) c.rounds = *o.rounds;
  c = core::ApplyOverrides(c, o.overrides);
  return {std::move(label), std::move(c)};
}

void UseAggregator(RunConfig& c, agg::AggregatorKind kind, size_t beta = 0) {
  c.agg.kind = kind;
  if (beta > 0) c.agg.beta = beta;
}

std::vector<ScenarioRun> Q1(const ScenarioOptions& o) {
  return {Finish("hyfl", Base(o, Mode::kHyFL), o), Finish("flat", Base(o, Mode::kFlatSingle), o)};
}

std::vector<ScenarioRun> Q2(const ScenarioOptions& o) {
  RunConfig c = Base(o, Mode::kHyFL);
  if (!o.full_scale) {
    // One cluster trains on the same 2000 samples every round.
    c.data.train_limit = 2000;
    c.total_clients = 1;
    c.clusters = 1;
    c.sampled_per_cluster = 1;
    c.clients_per_round = 1;
    c.shard_size = 2000;
    c.pool_cap = 2000;
    c.train.epochs = 1;
  }
  std::vector<ScenarioRun> runs;
  for (auto backend : {core::ExperimentBackend::kFloat, core::ExperimentBackend::kFixed}) {
    c.backend = backend;
    runs.push_back(Finish(std::string(core::ToString(backend)), c, o));
  }
  return runs;
}

std::vector<ScenarioRun> Q4(const ScenarioOptions& o) {
  using attacks::AttackKind;
  using attacks::Placement;
  std::vector<ScenarioRun> runs;
  const agg::AggregatorKind aggs[] = {agg::AggregatorKind::kFedAvg,
                                      agg::AggregatorKind::kTrimmedMean,
                                      agg::AggregatorKind::kFlTrust};
  RunConfig base = Base(o, Mode::kHyFL);
  if (!o.full_scale) base.rounds = kDeskGridRounds;
  for (auto a : aggs) {
    RunConfig c = base;
    UseAggregator(c, a);
    runs.push_back(Finish(fmt::format("clean-{}", agg::ToString(a)), c, o));
  }
  for (auto kind : {AttackKind::kRlf, AttackKind::kSlf, AttackKind::kDlf, AttackKind::kTlf}) {
    for (double rate : {0.01, 0.1, 0.2}) {
      for (auto placement :
           {Placement::kEquallyDistributed, Placement::kFocused, Placement::kClusterFocused}) {
        for (auto a : aggs) {
          RunConfig c = base;
          UseAggregator(c, a);
          c.attack.kind = kind;
          c.attack.poison_rate = rate;
          c.attack.placement = placement;
          runs.push_back(Finish(fmt::format("{}-{}-{}-{}", attacks::ToString(kind), rate,
                                            attacks::ToString(placement), agg::ToString(a)),
                                c, o));
        }
      }
    }
  }
  return runs;
}

std::vector<ScenarioRun> Q5(const ScenarioOptions& o) {
  RunConfig c = Base(o, Mode::kHyFL);
  c.arch = "lenet";
  c.backend = core::ExperimentBackend::kFixed;
  c.rounds = 1;
  c.train.epochs = 1;
  std::vector<ScenarioRun> runs;
  auto add = [&](std::string label, agg::AggregatorKind kind, size_t beta = 0) {
    RunConfig r = c;
    UseAggregator(r, kind, beta);
    runs.push_back(Finish(std::move(label), r, o));
  };
  add("FedAvg", agg::AggregatorKind::kFedAvg);
  add("TM", agg::AggregatorKind::kTrimmedMean);
  add("TM-10", agg::AggregatorKind::kTmVariant, 10);
  add("TM-100", agg::AggregatorKind::kTmVariant, 100);
  add("TM-1000", agg::AggregatorKind::kTmVariant, 1000);
  add("FLTrust", agg::AggregatorKind::kFlTrust);
  return runs;
}

std::vector<ScenarioRun> Q6(const ScenarioOptions& o) {
  RunConfig c = Base(o, Mode::kHyFL);
  c.attack.kind = attacks::AttackKind::kDlf;
  c.attack.poison_rate = 0.2;
  c.attack.placement = attacks::Placement::kFocused;
  std::vector<ScenarioRun> runs;
  auto add = [&](std::string label, agg::AggregatorKind kind, size_t beta = 0) {
    RunConfig r = c;
    UseAggregator(r, kind, beta);
    runs.push_back(Finish(std::move(label), r, o));
  };
  add("TM", agg::AggregatorKind::kTrimmedMean);
  add("TM-10", agg::AggregatorKind::kTmVariant, 10);
  add("TM-100", agg::AggregatorKind::kTmVariant, 100);
  add("TM-1000", agg::AggregatorKind::kTmVariant, 1000);
  return runs;
}

}  // namespace

std::vector<std::string> ScenarioNames() {
  return {"q1-convergence", "q2-backend", "q4-attack-grid", "q5-cost", "q6-tm-variant"};
}

bool IsScenario(std::string_view name) {
  for (const auto& n : ScenarioNames()) {
    if (n == name) return true;
  }
  return false;
}

RunConfig DeskConfig(Mode mode) {
  RunConfig c = core::DefaultConfig(mode);
  c.arch = "mlp";
  c.rounds = 100;
  c.total_clients = 200;
  c.clusters = 10;
  c.sampled_per_cluster = 2;
  c.clients_per_round = 20;
  if (mode == Mode::kHyFL) {
    c.pool_cap = 1000;
  } else {
    c.agg.alpha = 4;
  }
  return c;
}

void SetDataDir(RunConfig& c, const std::string& dir) {
  const std::filesystem::path d(dir);
  c.data.train_images = (d / "train-images-idx3-ubyte").string();
  c.data.train_labels = (d / "train-labels-idx1-ubyte").string();
  c.data.test_images = (d / "t10k-images-idx3-ubyte").string();
  c.data.test_labels = (d / "t10k-labels-idx1-ubyte").string();
}

std::vector<ScenarioRun> ScenarioRuns(std::string_view name, const ScenarioOptions& o) {
  if (name == "q1-convergence") return Q1(o);
  if (name == "q2-backend") return Q2(o);
  if (name == "q4-attack-grid") return Q4(o);
  if (name == "q5-cost") return Q5(o);
  if (name == "q6-tm-variant") return Q6(o);
  throw ConfigError("scenario", "unknown scenario '" + std::string(name) + "'");
}

std::string CurvesCsv(const std::vector<std::string>& labels,
                      const std::vector<core::TrainingResult>& results) {
  std::string out = std::string("label,") + core::kMetricsHeader + "\n";
  for (size_t i = 0; i < results.size(); ++i) {
    const std::string csv = core::MetricsCsv(results[i].metrics);
    size_t pos = csv.find('\n') + 1;
    while (pos < csv.size()) {
      const size_t end = csv.find('\n', pos);
      out += labels[i] + "," + csv.substr(pos, end - pos + 1);
      pos = end + 1;
    }
  }
  return out;
}

std::string CostCsv(const std::vector<std::string>& labels,
                    const std::vector<core::TrainingResult>& results) {
  std::string out =
      "label,aggregator,beta,gamma,round_bytes,aggregation_bytes,aggregation_rounds,"
      "comparisons,tally_comparisons,beaver_triples,tm_comparison_ratio\n";
  uint64_t tm_comparisons = 0;
  for (const auto& r : results) {
    if (r.config.agg.kind == agg::AggregatorKind::kTrimmedMean && !r.metrics.empty()) {
      tm_comparisons = r.metrics.front().comparisons;
    }
  }
  for (size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (r.metrics.empty()) continue;
    const auto& m = r.metrics.front();
    const bool variant = r.config.agg.kind == agg::AggregatorKind::kTmVariant;
    const std::string ratio = tm_comparisons > 0 && m.comparisons > 0
                                  ? fmt::format("{}", static_cast<double>(tm_comparisons) /
                                                          static_cast<double>(m.comparisons))
                                  : "";
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", labels[i],
                       agg::ToString(r.config.agg.kind), variant ? r.config.agg.beta : 0,
                       r.arch.param_count(), m.bytes, m.aggregation_bytes, m.aggregation_rounds,
                       m.comparisons, m.tally_comparisons, m.beaver_triples, ratio);
  }
  return out;
}

ScenarioReport RunScenario(std::string_view name, const ScenarioOptions& options,
                           const std::filesystem::path& out, std::ostream& log) {
  const auto runs = ScenarioRuns(name, options);
  ScenarioReport report;
  std::map<std::string, core::Datasets> cache;  // keyed by data section
  for (const auto& run : runs) {
    const auto key = fmt::format("{}|{}|{}|{}|{}|{}", run.config.data.train_images,
                                 run.config.data.train_labels, run.config.data.test_images,
                                 run.config.data.test_labels, run.config.data.train_limit,
                                 run.config.data.test_limit);
    if (!cache.count(key)) cache.emplace(key, core::LoadDatasets(run.config));
    const auto start = std::chrono::steady_clock::now();
    log << fmt::format("[{}] {} ({} rounds)\n", name, run.label, run.config.rounds) << std::flush;
    core::TrainingResult result = core::RunTraining(run.config, cache.at(key));
    core::WriteRunArtifacts(result, out / run.label);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log << fmt::format("[{}] {} done in {:.1f} s, final accuracy {}\n", name, run.label, secs,
                       result.metrics.empty() ? std::string("n/a")
                                              : fmt::format("{:.4f}", result.metrics.back().accuracy))
        << std::flush;
    report.labels.push_back(run.label);
    report.results.push_back(std::move(result));
  }
  core::WriteTextFile(out / "curves.csv", CurvesCsv(report.labels, report.results));
  if (name == "q5-cost") {
    core::WriteTextFile(out / "cost.csv", CostCsv(report.labels, report.results));
  }
  return report;
}

}  // namespace hyfl::cli
