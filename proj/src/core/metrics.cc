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

#include "hyfl/core/metrics.h"

#include <fmt/format.h>

#include <fstream>
#include <json.hpp>
#include <system_error>

#include "hyfl/common/error.h"

namespace hyfl::core {
namespace {

template <class T>
std::string Join(const std::vector<T>& values) {
  return fmt::format("{}", fmt::join(values, ";"));
}

}  // namespace

std::string MetricsCsv(const std::vector<RoundMetrics>& rows) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.round, r.accuracy, r.aggregator,
                       r.attack, r.rate, r.placement, r.bytes, r.comparisons,
                       Join(r.excluded_ids), r.seed);
  }
  return out;
}

std::string DetailsCsv(const std::vector<RoundMetrics>& rows) {
  std::string out =
      "round,fixed_accuracy,comm_rounds,tally_comparisons,beaver_triples,"
      "aggregation_bytes,aggregation_rounds,excluded_malicious,source_ids,trust_scores\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.round,
                       r.fixed_accuracy ? fmt::format("{}", *r.fixed_accuracy) : "",
                       r.comm_rounds, r.tally_comparisons, r.beaver_triples,
                       r.aggregation_bytes, r.aggregation_rounds, r.excluded_malicious, Join(r.source_ids), Join(r.trust_scores));
  }
  return out;
}

std::string SeedRecord(const RunConfig& c) {
  std::string out = fmt::format("master {}\n", c.seed);
  auto line = [&](std::string_view kind, uint64_t id, uint64_t round) {
    out += fmt::format("{} id={} round={} seed={}\n", kind, id, round,
                       DeriveSeed(c.seed, kind, id, round));
  };
  line("init", 0, 0);
  line("engine", 0, 0);
  line("attack", 0, 0);
  line("attack-placement", 0, 0);
  line("root", 0, 0);
  line("aggregate", 0, 1);
  line("tm-variant", 0, 1);
  line("train", 0, 1);
  line("unit", 0, 1);
  line("sample", 0, 1);
  return out;
}

std::string SummaryJson(const TrainingResult& result) {
  nlohmann::ordered_json j;
  j["mode"] = std::string(ToString(result.config.mode));
  j["backend"] = std::string(ToString(result.config.backend));
  j["arch"] = result.arch.Describe();
  j["param_count"] = result.arch.param_count();
  j["rounds"] = result.metrics.size();
  j["seed"] = result.config.seed;
  j["final_accuracy"] = result.metrics.empty() ? nlohmann::ordered_json(nullptr)
                                               : nlohmann::ordered_json(result.metrics.back().accuracy);
  nlohmann::ordered_json fixed = nlohmann::ordered_json::array();
  for (const auto& r : result.metrics) {
    if (r.fixed_accuracy) fixed.push_back({{"round", r.round}, {"accuracy", *r.fixed_accuracy}});
  }
  j["fixed_checks"] = fixed;
  j["totals"] = {{"bytes", result.totals.bytes},
                 {"rounds", result.totals.rounds},
                 {"comparisons", result.totals.comparisons},
                 {"tally_comparisons", result.totals.tally_comparisons},
                 {"beaver_triples", result.totals.beaver_triples},
                 {"nonlinear_ops", result.totals.nonlinear_ops}};
  j["malicious_clients"] = result.malicious;
  return j.dump(2) + "\n";
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  HYFL_ENFORCE(out.good(), RuntimeFailure, "cannot write " + path.string());
}

void WriteRunArtifacts(const TrainingResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  HYFL_ENFORCE(!ec && std::filesystem::is_directory(dir), RuntimeFailure,
               "cannot create output directory " + dir.string());
  WriteTextFile(dir / "metrics.csv", MetricsCsv(result.metrics));
  WriteTextFile(dir / "details.csv", DetailsCsv(result.metrics));
  WriteTextFile(dir / "config.txt", ToText(result.config));
  WriteTextFile(dir / "seeds.txt", SeedRecord(result.config));
  WriteTextFile(dir / "summary.json", SummaryJson(result));
  WriteFinalModel(result, dir);
}

}  // namespace hyfl::core
