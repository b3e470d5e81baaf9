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

#include "hyfl/core/config.h"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "hyfl/common/error.h"
#include "hyfl/nn/architecture.h"

namespace hyfl::core {
namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

int64_t ToInt(const std::string& key, const std::string& v) {
  int64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
  return out;
}

size_t ToSize(const std::string& key, const std::string& v) {
  const int64_t x = ToInt(key, v);
  if (x < 0) throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
  return static_cast<size_t>(x);
}

uint64_t ToU64(const std::string& key, const std::string& v) {
  uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(key, "expected an unsigned integer, got '" + v + "'");
  }
  return out;
}

double ToDouble(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(key, "expected a number, got '" + v + "'");
}

bool ToBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

// Rethrows a library parse error as a ConfigError on `key`.
template <class F>
auto Keyed(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key, e.what());
  }
}

ExperimentBackend ParseBackend(const std::string& v) {
  if (v == "float") return ExperimentBackend::kFloat;
  if (v == "fixed") return ExperimentBackend::kFixed;
  if (v == "multiparty") return ExperimentBackend::kMultiParty;
  throw ConfigError("backend", "unknown backend '" + v + "' (float, fixed, multiparty)");
}

AggTarget ParseTarget(const std::string& v) {
  if (v == "delta") return AggTarget::kDelta;
  if (v == "raw") return AggTarget::kRaw;
  throw ConfigError("agg.target", "unknown target '" + v + "' (delta, raw)");
}

std::string Num(double x) { return fmt::format("{}", x); }

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define HYFL_SIZE_FIELD(KEY, MEMBER)                                           \
  Field {                                                                      \
    KEY, [](RunConfig& c, const std::string& v) { c.MEMBER = ToSize(KEY, v); }, \
        [](const RunConfig& c) { return std::to_string(c.MEMBER); }            \
  }
#define HYFL_INT_FIELD(KEY, MEMBER)                                            \
  Field {                                                                      \
    KEY,                                                                       \
        [](RunConfig& c, const std::string& v) {                               \
          c.MEMBER = static_cast<decltype(c.MEMBER)>(ToInt(KEY, v));           \
        },                                                                     \
        [](const RunConfig& c) { return std::to_string(c.MEMBER); }            \
  }
#define HYFL_DOUBLE_FIELD(KEY, MEMBER)                                              \
  Field {                                                                           \
    KEY, [](RunConfig& c, const std::string& v) { c.MEMBER = ToDouble(KEY, v); },    \
        [](const RunConfig& c) { return Num(c.MEMBER); }                            \
  }
#define HYFL_STRING_FIELD(KEY, MEMBER)                                   \
  Field {                                                                \
    KEY, [](RunConfig& c, const std::string& v) { c.MEMBER = v; },       \
        [](const RunConfig& c) { return c.MEMBER; }                      \
  }

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      {"mode", [](RunConfig& c, const std::string& v) { c.mode = ParseMode(v); },
       [](const RunConfig& c) { return std::string(ToString(c.mode)); }},
      {"backend", [](RunConfig& c, const std::string& v) { c.backend = ParseBackend(v); },
       [](const RunConfig& c) { return std::string(ToString(c.backend)); }},
      HYFL_INT_FIELD("rounds", rounds),
      {"seed", [](RunConfig& c, const std::string& v) { c.seed = ToU64("seed", v); },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      HYFL_STRING_FIELD("model.arch", arch),
      HYFL_STRING_FIELD("data.train_images", data.train_images),
      HYFL_STRING_FIELD("data.train_labels", data.train_labels),
      HYFL_STRING_FIELD("data.test_images", data.test_images),
      HYFL_STRING_FIELD("data.test_labels", data.test_labels),
      HYFL_SIZE_FIELD("data.train_limit", data.train_limit),
      HYFL_SIZE_FIELD("data.test_limit", data.test_limit),
      HYFL_SIZE_FIELD("clients.total", total_clients),
      HYFL_SIZE_FIELD("clients.per_round", clients_per_round),
      HYFL_SIZE_FIELD("clients.shard_size", shard_size),
      HYFL_SIZE_FIELD("hyfl.clusters", clusters),
      HYFL_SIZE_FIELD("hyfl.sample_per_cluster", sampled_per_cluster),
      HYFL_INT_FIELD("hyfl.committee_size", committee_size),
      HYFL_INT_FIELD("hyfl.global_size", global_size),
      HYFL_SIZE_FIELD("hyfl.pool_cap", pool_cap),
      HYFL_INT_FIELD("train.epochs", train.epochs),
      HYFL_INT_FIELD("train.batch", train.batch_size),
      HYFL_DOUBLE_FIELD("train.lr", train.learning_rate),
      HYFL_DOUBLE_FIELD("train.momentum", train.momentum),
      HYFL_DOUBLE_FIELD("train.weight_decay", train.weight_decay),
      {"agg.kind",
       [](RunConfig& c, const std::string& v) { c.agg.kind = agg::ParseAggregatorKind(v); },
       [](const RunConfig& c) { return std::string(agg::ToString(c.agg.kind)); }},
      {"agg.target", [](RunConfig& c, const std::string& v) { c.agg_target = ParseTarget(v); },
       [](const RunConfig& c) { return std::string(ToString(c.agg_target)); }},
      HYFL_SIZE_FIELD("trim.alpha", agg.alpha),
      HYFL_SIZE_FIELD("trim.beta", agg.beta),
      {"trim.network",
       [](RunConfig& c, const std::string& v) { c.agg.network = agg::ParseNetworkKind(v); },
       [](const RunConfig& c) { return std::string(agg::ToString(c.agg.network)); }},
      HYFL_SIZE_FIELD("fltrust.root_size", root_size),
      {"attack.kind",
       [](RunConfig& c, const std::string& v) { c.attack.kind = attacks::ParseAttackKind(v); },
       [](const RunConfig& c) { return std::string(attacks::ToString(c.attack.kind)); }},
      HYFL_DOUBLE_FIELD("attack.rate", attack.poison_rate),
      {"attack.placement",
       [](RunConfig& c, const std::string& v) { c.attack.placement = attacks::ParsePlacement(v); },
       [](const RunConfig& c) { return std::string(attacks::ToString(c.attack.placement)); }},
      HYFL_INT_FIELD("attack.tlf_source", attack.tlf_source),
      HYFL_INT_FIELD("attack.tlf_target", attack.tlf_target),
      HYFL_INT_FIELD("attack.dlf_epochs", attack.dlf_surrogate.epochs),
      HYFL_INT_FIELD("attack.dlf_batch", attack.dlf_surrogate.batch_size),
      HYFL_DOUBLE_FIELD("attack.dlf_lr", attack.dlf_surrogate.learning_rate),
      HYFL_DOUBLE_FIELD("attack.dlf_momentum", attack.dlf_surrogate.momentum),
      HYFL_DOUBLE_FIELD("attack.dlf_weight_decay", attack.dlf_surrogate.weight_decay),
      HYFL_SIZE_FIELD("cost.compare_bytes", cost.compare_bytes),
      HYFL_SIZE_FIELD("cost.compare_rounds", cost.compare_rounds),
      HYFL_SIZE_FIELD("cost.nonlinear_bytes", cost.nonlinear_bytes),
      HYFL_SIZE_FIELD("cost.nonlinear_rounds", cost.nonlinear_rounds),
      HYFL_INT_FIELD("eval.fixed_check_every", fixed_check_every),
      {"exec.parallel",
       [](RunConfig& c, const std::string& v) { c.parallel = ToBool("exec.parallel", v); },
       [](const RunConfig& c) { return std::string(c.parallel ? "true" : "false"); }},
  };
  return fields;
}

#undef HYFL_SIZE_FIELD
#undef HYFL_INT_FIELD
#undef HYFL_DOUBLE_FIELD
#undef HYFL_STRING_FIELD

const Field* FindField(const std::string& key) {
  for (const auto& f : Fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

// Ordered key/value pairs of a document; duplicate keys are an error.
std::vector<std::pair<std::string, std::string>> Tokenize(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string t = Trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    }
    std::string key = Trim(std::string_view(t).substr(0, eq));
    std::string value = Trim(std::string_view(t).substr(eq + 1));
    for (const auto& [k, v] : out) {
      if (k == key) throw ConfigError(key, "key given twice");
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

RunConfig Build(const std::vector<std::pair<std::string, std::string>>& kv) {
  Mode mode = Mode::kHyFL;
  for (const auto& [k, v] : kv) {
    if (k == "mode") mode = ParseMode(v);
  }
  RunConfig c = DefaultConfig(mode);
  for (const auto& [k, v] : kv) {
    const Field* f = FindField(k);
    if (f == nullptr) throw ConfigError(k, "unknown key");
    Keyed(k, [&] { f->set(c, v); });
  }
  Validate(c);
  return c;
}

void Require(bool cond, const std::string& key, const std::string& message) {
  if (!cond) throw ConfigError(key, message);
}

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) { return ToText(a) == ToText(b); }

std::string_view ToString(Mode mode) {
  switch (mode) {
    case Mode::kHyFL: return "hyfl";
    case Mode::kFlatSingle: return "flat";
    case Mode::kFlatMulti: return "flat-multi";
    case Mode::kHierarchical: return "hierarchical";
  }
  return "?";
}

std::string_view ToString(ExperimentBackend backend) {
  switch (backend) {
    case ExperimentBackend::kFloat: return "float";
    case ExperimentBackend::kFixed: return "fixed";
    case ExperimentBackend::kMultiParty: return "multiparty";
  }
  return "?";
}

std::string_view ToString(AggTarget target) {
  return target == AggTarget::kDelta ? "delta" : "raw";
}

Mode ParseMode(std::string_view name) {
  for (Mode m : {Mode::kHyFL, Mode::kFlatSingle, Mode::kFlatMulti, Mode::kHierarchical}) {
    if (name == ToString(m)) return m;
  }
  throw ConfigError("mode", "unknown mode '" + std::string(name) +
                                "' (hyfl, flat, flat-multi, hierarchical)");
}

RunConfig DefaultConfig(Mode mode) {
  RunConfig c;
  c.mode = mode;
  const bool hyfl = mode == Mode::kHyFL;
  c.train.epochs = 5;
  c.train.batch_size = hyfl ? 80 : 8;
  c.train.learning_rate = hyfl ? 0.05 : 0.005;
  c.agg.alpha = hyfl ? 2 : 20;
  return c;
}

RunConfig ParseConfig(std::string_view text) { return Build(Tokenize(text)); }

RunConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.good()) throw ConfigError("config", "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str());
}

RunConfig ApplyOverrides(const RunConfig& base, const std::map<std::string, std::string>& kv) {
  auto pairs = Tokenize(ToText(base));
  for (const auto& [k, v] : kv) {
    bool found = false;
    for (auto& [pk, pv] : pairs) {
      if (pk == k) {
        pv = v;
        found = true;
      }
    }
    if (!found) pairs.emplace_back(k, v);
  }
  return Build(pairs);
}

std::string ToText(const RunConfig& config) {
  std::string out;
  for (const auto& f : Fields()) out += f.key + " = " + f.get(config) + "\n";
  return out;
}

void Validate(const RunConfig& c) {
  Require(c.mode != Mode::kHierarchical, "mode",
          "hierarchical mode is not implemented (use hyfl, flat or flat-multi)");
  Require(c.rounds >= 0, "rounds", "must be >= 0");
  Require(c.total_clients >= 1, "clients.total", "must be >= 1");
  Require(c.shard_size >= 1, "clients.shard_size", "must be >= 1");
  Require(c.clusters >= 1, "hyfl.clusters", "must be >= 1");
  Require(c.total_clients % c.clusters == 0, "hyfl.clusters",
          "must divide clients.total (" + std::to_string(c.total_clients) + ")");
  const size_t per_cluster = c.total_clients / c.clusters;
  if (c.mode == Mode::kHyFL) {
    Require(c.sampled_per_cluster >= 1 && c.sampled_per_cluster <= per_cluster,
            "hyfl.sample_per_cluster",
            "must lie in [1, " + std::to_string(per_cluster) + "]");
    Require(c.clients_per_round == c.clusters * c.sampled_per_cluster, "clients.per_round",
            "inconsistent with hyfl.clusters * hyfl.sample_per_cluster = " +
                std::to_string(c.clusters * c.sampled_per_cluster));
    Require(c.committee_size >= 2, "hyfl.committee_size", "must be >= 2");
  } else {
    Require(c.clients_per_round >= 1 && c.clients_per_round <= c.total_clients,
            "clients.per_round", "must lie in [1, clients.total]");
  }
  if (c.mode != Mode::kFlatSingle) {
    Require(c.global_size >= 2, "hyfl.global_size", "must be >= 2");
  }
  if (c.mode == Mode::kFlatSingle) {
    Require(c.backend == ExperimentBackend::kFloat, "backend",
            "single-server flat FL trains and aggregates in the clear; use backend = float");
  }
  if (c.mode == Mode::kFlatMulti) {
    Require(c.backend != ExperimentBackend::kFloat, "backend",
            "multi-server flat FL aggregates on shares; use backend = fixed or multiparty");
  }
  Require(c.train.epochs >= 1, "train.epochs", "must be >= 1");
  Require(c.train.batch_size >= 1, "train.batch", "must be >= 1");
  Require(c.train.learning_rate >= 0, "train.lr", "must be >= 0");

  const nn::Architecture arch =
      Keyed("model.arch", [&] { return nn::Architecture::FromName(c.arch); });
  const size_t m = AggregationInputs(c);
  if (c.agg.kind == agg::AggregatorKind::kTrimmedMean ||
      c.agg.kind == agg::AggregatorKind::kTmVariant) {
    Require(2 * c.agg.alpha < m, "trim.alpha",
            "2*alpha < m violated (alpha " + std::to_string(c.agg.alpha) + ", m " +
                std::to_string(m) + ")");
  }
  if (c.agg.kind == agg::AggregatorKind::kTmVariant) {
    Require(c.agg.beta >= 1 && c.agg.beta <= arch.param_count(), "trim.beta",
            "must lie in [1, " + std::to_string(arch.param_count()) + "]");
  }
  Require(c.root_size >= 1, "fltrust.root_size", "must be >= 1");
  Require(c.attack.poison_rate >= 0 && c.attack.poison_rate <= 1, "attack.rate",
          "must lie in [0, 1]");
  const int classes = arch.num_classes();
  Require(c.attack.tlf_source >= 0 && c.attack.tlf_source < classes, "attack.tlf_source",
          "must be a class id");
  Require(c.attack.tlf_target >= 0 && c.attack.tlf_target < classes, "attack.tlf_target",
          "must be a class id");
  Require(c.attack.tlf_source != c.attack.tlf_target, "attack.tlf_target",
          "must differ from attack.tlf_source");
  Require(c.attack.dlf_surrogate.epochs >= 1, "attack.dlf_epochs", "must be >= 1");
  Require(c.attack.dlf_surrogate.batch_size >= 1, "attack.dlf_batch", "must be >= 1");
  Require(c.fixed_check_every >= 0, "eval.fixed_check_every", "must be >= 0");
}

size_t AggregationInputs(const RunConfig& config) {
  return config.mode == Mode::kHyFL ? config.clusters : config.clients_per_round;
}

}  // namespace hyfl::core
