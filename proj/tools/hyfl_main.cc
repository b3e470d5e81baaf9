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

// hyfl: batch front-end.
//
//   hyfl run <config> [--out DIR] [--set key=value]...
//   hyfl scenario <name> [--out DIR] [--seed N] [--rounds N] [--full-scale]
//   hyfl verify
//   hyfl inspect <checkpoint>
//
// Exit codes: 0 success, 1 runtime error, 2 usage or configuration error.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cmath>
#include <iostream>

#include "hyfl/cli/scenarios.h"
#include "hyfl/cli/verify.h"
#include "hyfl/common/error.h"
#include "hyfl/core/config.h"
#include "hyfl/core/metrics.h"
#include "hyfl/core/orchestrator.h"
#include "hyfl/nn/model.h"

namespace {

constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

std::map<std::string, std::string> ParseOverrides(const std::vector<std::string>& items) {
  std::map<std::string, std::string> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw hyfl::ConfigError("--set", "expected key=value, got '" + item + "'");
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

int CmdRun(const std::string& config_path, const std::string& out_dir,
           const std::vector<std::string>& sets, bool quiet) {
  using namespace hyfl;
  core::RunConfig config = core::LoadConfig(config_path);
  config = core::ApplyOverrides(config, ParseOverrides(sets));
  const core::Datasets data = core::LoadDatasets(config);
  const auto result = core::RunTraining(config, data, [&](const core::RoundMetrics& r) {
    if (!quiet) {
      std::cerr << fmt::format("round {} accuracy {:.4f} bytes {} comparisons {}\n", r.round,
                               r.accuracy, r.bytes, r.comparisons);
    }
  });
  core::WriteRunArtifacts(result, out_dir);
  std::cout << fmt::format("wrote {} rounds to {}\n", result.metrics.size(), out_dir);
  return 0;
}

int CmdScenario(const std::string& name, const std::string& out_dir,
                const hyfl::cli::ScenarioOptions& options) {
  using namespace hyfl;
  if (!cli::IsScenario(name)) {
    std::cerr << "unknown scenario '" << name << "'\n\nusage: hyfl scenario <name>\n"
              << "scenarios:\n";
    for (const auto& n : cli::ScenarioNames()) std::cerr << "  " << n << "\n";
    return kUsageError;
  }
  const std::filesystem::path out = out_dir.empty() ? std::filesystem::path("runs") / name
                                                    : std::filesystem::path(out_dir);
  cli::RunScenario(name, options, out, std::cerr);
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

int CmdVerify(uint64_t seed) {
  int failed = 0;
  for (const auto& r : hyfl::cli::RunVerification(seed)) {
    std::cout << fmt::format("{} {}{}\n", r.passed ? "PASS" : "FAIL", r.name,
                             r.detail.empty() ? "" : " (" + r.detail + ")");
    failed += r.passed ? 0 : 1;
  }
  return failed == 0 ? 0 : kRuntimeError;
}

int CmdInspect(const std::string& path) {
  const hyfl::nn::Model m = hyfl::nn::LoadCheckpoint(path);
  std::cout << "architecture: " << m.arch().Describe() << "\n";
  std::cout << "parameters:   " << m.param_count() << "\n";
  const bool fixed = m.backend() == hyfl::nn::NumericBackend::kFixed;
  std::cout << "backend:      " << (fixed ? "fixed" : "float") << "\n";
  const std::vector<double> v = m.Decoded();
  double sq = 0;
  for (double x : v) sq += x * x;
  std::cout << fmt::format("l2 norm:      {:.6g}", std::sqrt(sq))
            << (fixed ? " (a share file decodes to noise; combine all members' files)" : "")
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HyFL simulation framework"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Train from a config file");
  std::string config_path, run_out = "runs/run";
  std::vector<std::string> run_sets;
  bool quiet = false;
  run->add_option("config", config_path, "Config file (key = value lines)")->required();
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--set", run_sets, "Override, key=value (repeatable)");
  run->add_flag("--quiet", quiet, "No per-round progress");

  auto* scenario = app.add_subcommand("scenario", "Run an experiment preset");
  std::string scenario_name, scenario_out;
  std::vector<std::string> scenario_sets;
  int rounds = -1;
  hyfl::cli::ScenarioOptions options;
  scenario->add_option("name", scenario_name, "Preset name")->required();
  scenario->add_option("--out", scenario_out, "Output directory (default runs/<name>)");
  scenario->add_option("--seed", options.seed, "Master seed");
  scenario->add_option("--rounds", rounds, "Rounds per run");
  scenario->add_option("--data", options.data_dir, "Directory with the four MNIST IDX files");
  scenario->add_option("--set", scenario_sets, "Override, key=value (repeatable)");
  scenario->add_flag("--full-scale,--paper-scale", options.full_scale,
                     "Full-scale topology, model and round count");

  auto* verify = app.add_subcommand("verify", "Run the quick oracle and property checks");
  uint64_t verify_seed = 1;
  verify->add_option("--seed", verify_seed, "Seed");

  auto* inspect = app.add_subcommand("inspect", "Describe a checkpoint");
  std::string ckpt;
  inspect->add_option("checkpoint", ckpt, "Checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*run) return CmdRun(config_path, run_out, run_sets, quiet);
    if (*scenario) {
      if (rounds >= 0) options.rounds = rounds;
      options.overrides = ParseOverrides(scenario_sets);
      return CmdScenario(scenario_name, scenario_out, options);
    }
    if (*verify) return CmdVerify(verify_seed);
    if (*inspect) return CmdInspect(ckpt);
  } catch (const hyfl::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}
