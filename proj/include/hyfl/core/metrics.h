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

// Run artifacts.
//
//   metrics.csv   one row per round, fixed column order (kMetricsHeader)
//   details.csv   per-round extras: fixed-point cross-check, rounds,
//                 triples, tally comparisons, trust scores
//   config.txt    the full configuration; parses back to the same RunConfig
//   seeds.txt     master seed and the derived per-entity seeds of round 1
//   summary.json  final accuracy, cost totals, attacker ids
//   final-*.ckpt  the final model (shares per member of G, or plaintext)

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hyfl/core/orchestrator.h"

namespace hyfl::core {

inline constexpr const char* kMetricsHeader =
    "round,accuracy,aggregator,attack,rate,placement,bytes,comparisons,excluded_ids,seed";

std::string MetricsCsv(const std::vector<RoundMetrics>& rows);
std::string DetailsCsv(const std::vector<RoundMetrics>& rows);
std::string SeedRecord(const RunConfig& config);
std::string SummaryJson(const TrainingResult& result);

// Writes every artifact into `dir` (created if missing). Throws
// RuntimeFailure when the directory cannot be written.
void WriteRunArtifacts(const TrainingResult& result, const std::filesystem::path& dir);

// Writes `text` to `path`, throwing RuntimeFailure on failure.
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace hyfl::core
