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

// Experiment presets.
//
// Desk scale (the default): 200 clients in 10 clusters of 20, 2 sampled per
// cluster (20 per round), MLP, 100 rounds, cluster pools capped at 1000
// samples. Full scale restores the defaults of DefaultConfig (1000 clients,
// LeNet, 2000 rounds).
//
//   q1-convergence  HyFL vs flat FL, no attack                     2 runs
//   q2-backend      float vs fixed-point training, 2000 samples    2 runs
//   q4-attack-grid  {rlf,slf,dlf,tlf} x {0.01,0.1,0.2} x
//                   {equally,focused,cluster-focused} x
//                   {fedavg,tm,fltrust}, plus clean baselines    111 runs
//                   (desk: 20 rounds each)
//   q5-cost         one LeNet round per aggregator on shares       6 runs
//   q6-tm-variant   TM vs variant with beta 10/100/1000 under
//                   focused DLF at rate 0.2                        4 runs

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hyfl/core/config.h"
#include "hyfl/core/orchestrator.h"

namespace hyfl::cli {

struct ScenarioOptions {
  uint64_t seed = 1;
  std::optional<int> rounds;  // overrides the preset's round count
  bool full_scale = false;
  std::map<std::string, std::string> overrides;  // applied to every run
  std::string data_dir;                          // IDX directory, "" keeps the config paths
};

struct ScenarioRun {
  std::string label;
  core::RunConfig config;
};

std::vector<std::string> ScenarioNames();
bool IsScenario(std::string_view name);

// The desk-scale preset for `mode`.
core::RunConfig DeskConfig(core::Mode mode);

// The runs of scenario `name`. Throws ConfigError("scenario", ...) for an
// unknown name.
std::vector<ScenarioRun> ScenarioRuns(std::string_view name, const ScenarioOptions& options);

// Points the four IDX paths of `config` into `dir` (standard MNIST names).
void SetDataDir(core::RunConfig& config, const std::string& dir);

struct ScenarioReport {
  std::vector<std::string> labels;
  std::vector<core::TrainingResult> results;
};

// Runs every preset run, writing <out>/<label>/ artifacts, <out>/curves.csv
// (all runs, labelled) and for q5-cost <out>/cost.csv. Progress goes to
// `log`.
ScenarioReport RunScenario(std::string_view name, const ScenarioOptions& options,
                           const std::filesystem::path& out, std::ostream& log);

// All runs in one CSV: "label," followed by the metrics columns.
std::string CurvesCsv(const std::vector<std::string>& labels,
                      const std::vector<core::TrainingResult>& results);

// Per-run cost table of the first round.
std::string CostCsv(const std::vector<std::string>& labels,
                    const std::vector<core::TrainingResult>& results);

}  // namespace hyfl::cli
