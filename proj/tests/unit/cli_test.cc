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
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hyfl/cli/scenarios.h"
#include "hyfl/cli/verify.h"
#include "hyfl/common/error.h"
#include "hyfl/core/metrics.h"

namespace hyfl::cli {
namespace {

namespace fs = std::filesystem;

int RunCli(const std::string& args) {
  const std::string cmd = std::string(HYFL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path TempDir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

TEST(ScenarioTest, DeskPreset) {
  const core::RunConfig h = DeskConfig(core::Mode::kHyFL);
  EXPECT_EQ(h.total_clients, 200u);
  EXPECT_EQ(h.clusters, 10u);
  EXPECT_EQ(h.clients_per_round, 20u);
  EXPECT_EQ(h.arch, "mlp");
  EXPECT_EQ(h.rounds, 100);
  EXPECT_EQ(h.train.batch_size, 80);
  const core::RunConfig f = DeskConfig(core::Mode::kFlatSingle);
  EXPECT_EQ(f.clients_per_round, 20u);
  EXPECT_EQ(f.train.batch_size, 8);
  EXPECT_NO_THROW(core::Validate(h));
  EXPECT_NO_THROW(core::Validate(f));
}

TEST(ScenarioTest, PresetsValidateAndAreLabelled) {
  for (const auto& name : ScenarioNames()) {
    for (bool full : {false, true}) {
      ScenarioOptions o;
      o.full_scale = full;
      const auto runs = ScenarioRuns(name, o);
      ASSERT_FALSE(runs.empty()) << name;
      std::set<std::string> labels;
      for (const auto& r : runs) {
        EXPECT_TRUE(labels.insert(r.label).second) << r.label;
        EXPECT_NO_THROW(core::Validate(r.config)) << name << " " << r.label;
      }
    }
  }
}

TEST(ScenarioTest, VariantScenarioHasFourCurves) {
  const auto runs = ScenarioRuns("q6-tm-variant", {});
  ASSERT_EQ(runs.size(), 4u);
  EXPECT_EQ(runs[0].label, "TM");
  EXPECT_EQ(runs[1].label, "TM-10");
  EXPECT_EQ(runs[2].label, "TM-100");
  EXPECT_EQ(runs[3].label, "TM-1000");
  EXPECT_EQ(runs[2].config.agg.beta, 100u);
  EXPECT_EQ(runs[3].config.attack.kind, attacks::AttackKind::kDlf);
  EXPECT_EQ(runs[3].config.attack.placement, attacks::Placement::kFocused);
}

TEST(ScenarioTest, AttackGridCoversEveryCell) {
  const auto runs = ScenarioRuns("q4-attack-grid", {});
  EXPECT_EQ(runs.size(), 4u * 3u * 3u * 3u + 3u);
  for (const auto& r : runs) EXPECT_EQ(r.config.rounds, 20);
}

TEST(ScenarioTest, OptionsApply) {
  ScenarioOptions o;
  o.seed = 99;
  o.rounds = 3;
  o.overrides = {{"train.epochs", "2"}};
  o.data_dir = "/data/mnist";
  for (const auto& r : ScenarioRuns("q1-convergence", o)) {
    EXPECT_EQ(r.config.seed, 99u);
    EXPECT_EQ(r.config.rounds, 3);
    EXPECT_EQ(r.config.train.epochs, 2);
    EXPECT_EQ(r.config.data.train_images, "/data/mnist/train-images-idx3-ubyte");
  }
  o.overrides = {{"trim.alpha", "x"}};
  EXPECT_THROW(ScenarioRuns("q1-convergence", o), ConfigError);
}

TEST(ScenarioTest, UnknownScenario) {
  EXPECT_FALSE(IsScenario("q3"));
  EXPECT_THROW(ScenarioRuns("q3", {}), ConfigError);
}

TEST(ScenarioTest, CostTableReportsComparisonRatio) {
  ScenarioOptions o;
  o.overrides = {{"model.arch", "mlp"},
                 {"data.train_limit", "1000"},
                 {"clients.total", "20"},
                 {"hyfl.sample_per_cluster", "1"},
                 {"clients.per_round", "10"},
                 {"clients.shard_size", "20"}};
  const fs::path out = TempDir("hyfl_q5_test");
  std::ostringstream log;
  const auto report = RunScenario("q5-cost", o, out, log);
  ASSERT_EQ(report.labels.size(), 6u);
  const size_t gamma = report.results[0].arch.param_count();
  uint64_t tm = 0, tm100 = 0;
  for (size_t i = 0; i < report.labels.size(); ++i) {
    if (report.labels[i] == "TM") tm = report.results[i].metrics[0].comparisons;
    if (report.labels[i] == "TM-100") tm100 = report.results[i].metrics[0].comparisons;
  }
  EXPECT_EQ(tm, gamma * 31);
  EXPECT_EQ(tm100, 100u * 31);
  EXPECT_GT(static_cast<double>(tm) / static_cast<double>(tm100), 100.0);
  const std::string cost = ReadFile(out / "cost.csv");
  EXPECT_NE(cost.find("TM-100,tm-variant,100,101770,"), std::string::npos) << cost;
  fs::remove_all(out);
}

TEST(VerifyTest, AllChecksPass) {
  for (const auto& r : RunVerification()) EXPECT_TRUE(r.passed) << r.name << " " << r.detail;
}

TEST(CliTest, ExitCodes) {
  EXPECT_EQ(RunCli("verify"), 0);
  EXPECT_EQ(RunCli(""), 2);
  EXPECT_EQ(RunCli("frobnicate"), 2);
  EXPECT_EQ(RunCli("scenario q3-unknown"), 2);
  EXPECT_EQ(RunCli("run /nonexistent/config.txt"), 2);
  EXPECT_EQ(RunCli("inspect /nonexistent.ckpt"), 1);

  const fs::path dir = TempDir("hyfl_cli_test");
  std::ofstream(dir / "bad.txt") << "mode = hyfl\ntrim.alpha = 5\nagg.kind = tm\n";
  EXPECT_EQ(RunCli("run " + (dir / "bad.txt").string()), 2);
  std::ofstream(dir / "nodata.txt") << "rounds = 1\ndata.train_images = /nonexistent\n";
  EXPECT_EQ(RunCli("run " + (dir / "nodata.txt").string() + " --out " + (dir / "x").string()),
            1);
  fs::remove_all(dir);
}

TEST(CliTest, RunIsByteIdenticalAcrossInvocations) {
  const fs::path dir = TempDir("hyfl_cli_run_test");
  std::ofstream(dir / "c.txt") << "mode = flat\nmodel.arch = mlp\nrounds = 2\n"
                               << "clients.total = 20\nclients.per_round = 4\nhyfl.clusters = 2\n"
                               << "clients.shard_size = 20\ntrain.epochs = 1\n"
                               << "data.train_limit = 500\ndata.test_limit = 100\n";
  for (const char* out : {"a", "b"}) {
    ASSERT_EQ(RunCli("run " + (dir / "c.txt").string() + " --quiet --out " + (dir / out).string()),
              0);
  }
  const std::string a = ReadFile(dir / "a" / "metrics.csv");
  EXPECT_EQ(a, ReadFile(dir / "b" / "metrics.csv"));
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 3);
  // The config echo re-parses to the same configuration.
  EXPECT_TRUE(core::LoadConfig(dir / "a" / "config.txt") ==
              core::LoadConfig(dir / "b" / "config.txt"));
  EXPECT_EQ(RunCli("inspect " + (dir / "a" / "final.ckpt").string()), 0);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace hyfl::cli
