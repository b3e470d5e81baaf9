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

#include "hyfl/core/orchestrator.h"

#include <algorithm>
#include <exception>
#include <thread>

#include "hyfl/agg/aggregators.h"
#include "hyfl/attacks/attacks.h"
#include "hyfl/common/error.h"
#include "hyfl/nn/trainer.h"

namespace hyfl::core {
namespace {

using ring::FixedVec;

struct PoolItem {
  uint64_t client_id = 0;
  std::vector<uint32_t> indices;
  std::vector<int> labels;
};

using Pool = data::ClusterPool<PoolItem>;

nn::Examples PoolExamples(const Pool& pool, const data::Dataset& train) {
  nn::Examples ex;
  ex.sample_size = train.sample_size();
  for (const auto& entry : pool.entries()) {
    for (size_t i = 0; i < entry.payload.indices.size(); ++i) {
      ex.Add(train.sample(entry.payload.indices[i]), entry.payload.labels[i]);
    }
  }
  return ex;
}

// Features followed by labels, as the client would encode them for sharing.
FixedVec EncodeShard(const data::ClientShard& shard, const data::Dataset& train) {
  std::vector<double> flat;
  flat.reserve(shard.size() * (train.sample_size() + 1));
  for (uint32_t idx : shard.indices) {
    const float* x = train.sample(idx);
    flat.insert(flat.end(), x, x + train.sample_size());
  }
  flat.insert(flat.end(), shard.labels.begin(), shard.labels.end());
  return FixedVec::Encode(flat);
}

std::string ClientParty(uint64_t id) { return "client:" + std::to_string(id); }

// Plaintext model at a single aggregator (flat FL) or the float reference
// of HyFL. Clients in flat mode download and upload the model in the clear.
class PlainSide {
 public:
  using Domain = agg::PlainDomain;
  using Value = std::vector<double>;

  PlainSide(const nn::Architecture& arch, mpc::CostMeter& meter) : arch_(arch), meter_(meter) {}

  Domain MakeDomain(Rng&) { return Domain(&meter_); }
  Value Init(const nn::Model& m0, Rng&) { return m0.float_params(); }
  Value Copy(const Value& v) { return v; }

  void ShareClientData(const data::ClientShard&, const data::Dataset&, int, Rng&) {}

  Value TrainCluster(const Value& model, int, const nn::Examples& ex,
                     const nn::TrainSpec& spec, Rng&) {
    return nn::Train(nn::Model(arch_, model), ex, spec).float_params();
  }

  Value TrainClient(const Value& model, uint64_t client, const nn::Examples& ex,
                    const nn::TrainSpec& spec, Rng&) {
    const uint64_t bytes = model.size() * sizeof(uint64_t);
    meter_.AddBytes("S", ClientParty(client), bytes);
    Value w = nn::Train(nn::Model(arch_, model), ex, spec).float_params();
    meter_.AddBytes(ClientParty(client), "S", bytes);
    return w;
  }

  void EndClientRound() { meter_.AddRounds(2); }

  Value TrainRoot(const Value& model, const nn::Examples& ex, const nn::TrainSpec& spec,
                  Rng& rng) {
    return TrainCluster(model, -1, ex, spec, rng);
  }

  std::vector<double> Reveal(const Value& v) const { return v; }

 private:
  const nn::Architecture& arch_;
  mpc::CostMeter& meter_;
};

// Shares at committee G on a sharing engine. Training runs inside an ideal
// "train" functionality of the committee holding the model.
class SharedSide {
 public:
  using Domain = agg::SharedDomain;
  using Value = mpc::ShareSet;

  SharedSide(const nn::Architecture& arch, mpc::SharingEngine& engine, const Topology& topo)
      : arch_(arch), engine_(engine), topo_(topo) {}

  Domain MakeDomain(Rng& rng) { return Domain(engine_, topo_.global.id, rng); }

  Value Init(const nn::Model& m0, Rng& rng) {
    return engine_.ShareFromFunctionality(FixedVec::Encode(m0.float_params()), topo_.global.id,
                                          rng, "init");
  }
  Value Copy(const Value& v) { return v; }

  void ShareClientData(const data::ClientShard& shard, const data::Dataset& train, int cluster,
                       Rng& rng) {
    // Charged on the meter; the pool keeps a handle to the shard.
    engine_.Share(EncodeShard(shard, train), topo_.clusters[cluster].committee.id, rng,
                  ClientParty(shard.client_id));
  }

  Value TrainCluster(const Value& model, int cluster, const nn::Examples& ex,
                     const nn::TrainSpec& spec, Rng& rng) {
    const std::string& e = topo_.clusters[cluster].committee.id;
    Value copy = model;
    Value local = engine_.Reshare(copy, topo_.global.id, e, rng);
    Value trained = TrainIn(local, e, ex, spec, rng);
    return engine_.Reshare(trained, e, topo_.global.id, rng);
  }

  Value TrainClient(const Value& model, uint64_t client, const nn::Examples& ex,
                    const nn::TrainSpec& spec, Rng& rng) {
    const FixedVec received = engine_.Reveal(model, mpc::Receiver::Client(client));
    const nn::Model w = nn::Train(nn::Model(arch_, received.Decode()), ex, spec);
    return engine_.Share(FixedVec::Encode(w.float_params()), topo_.global.id, rng,
                         ClientParty(client));
  }

  void EndClientRound() {}

  Value TrainRoot(const Value& model, const nn::Examples& ex, const nn::TrainSpec& spec,
                  Rng& rng) {
    return TrainIn(model, topo_.global.id, ex, spec, rng);
  }

  std::vector<double> Reveal(const Value& v) const {
    return engine_.Reveal(v, mpc::Receiver::Metrics()).Decode();
  }

 private:
  Value TrainIn(const Value& model, const std::string& owner, const nn::Examples& ex,
                const nn::TrainSpec& spec, Rng& rng) {
    const FixedVec opened = engine_.OpenInFunctionality(model, "train");
    const nn::Model trained = nn::Train(nn::Model(arch_, opened), ex, spec);
    return engine_.ShareFromFunctionality(trained.fixed_params(), owner, rng, "train");
  }

  const nn::Architecture& arch_;
  mpc::SharingEngine& engine_;
  const Topology& topo_;
};

template <class T>
void RunUnits(size_t n, bool parallel, T&& body) {
  std::vector<std::exception_ptr> errors(n);
  auto guarded = [&](size_t i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (parallel && n > 1) {
    std::vector<std::thread> threads;
    threads.reserve(n);
    for (size_t i = 0; i < n; ++i) threads.emplace_back(guarded, i);
    for (auto& t : threads) t.join();
  } else {
    for (size_t i = 0; i < n; ++i) guarded(i);
  }
  // The first failing unit in id order aborts the round.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string JoinPlacement(const RunConfig& c) {
  return c.attack.kind == attacks::AttackKind::kNone
             ? std::string("none")
             : std::string(attacks::ToString(c.attack.placement));
}

class Runner {
 public:
  Runner(const RunConfig& config, const Datasets& data, const RoundCallback& on_round)
      : c_(config), data_(data), on_round_(on_round) {
    Validate(c_);
    result_.config = c_;
    result_.arch = nn::Architecture::FromName(c_.arch);
    result_.topology = ConfigureAbstraction(c_);
    HYFL_ENFORCE(data_.train.sample_size() == result_.arch.input_shape().size(), ShapeError,
                 "dataset samples have " + std::to_string(data_.train.sample_size()) +
                     " features, model '" + c_.arch + "' expects " +
                     std::to_string(result_.arch.input_shape().size()));
    test_ = data_.test.AllExamples();
  }

  TrainingResult Run() {
    SetUpClients();
    if (c_.backend == ExperimentBackend::kFloat) {
      PlainSide side(result_.arch, plain_meter_);
      Loop(side, plain_meter_);
      result_.totals = plain_meter_.totals();
    } else {
      mpc::EngineOptions opts;
      opts.seed = DeriveSeed(c_.seed, "engine");
      opts.cost_model = c_.cost;
      result_.engine = mpc::MakeEngine(c_.backend == ExperimentBackend::kFixed
                                           ? mpc::Backend::kSimulation
                                           : mpc::Backend::kMultiParty,
                                       opts);
      result_.engine->RegisterPartySet(result_.topology.global);
      if (result_.topology.data_shared) {
        for (const auto& cl : result_.topology.clusters) {
          result_.engine->RegisterPartySet(cl.committee);
        }
      }
      SharedSide side(result_.arch, *result_.engine, result_.topology);
      Loop(side, result_.engine->meter());
      result_.totals = result_.engine->meter().totals();
    }
    return std::move(result_);
  }

 private:
  void SetUpClients() {
    shards_ = data::ShardClients(data_.train, c_.total_clients, c_.shard_size, c_.seed);
    const auto groups = PlacementGroups(c_);
    for (size_t g = 0; g < groups.size(); ++g) {
      for (uint64_t id : groups[g]) shards_[id].cluster_id = static_cast<int>(g);
    }
    result_.malicious = attacks::ApplyAttack(c_.attack, shards_, groups, data_.train,
                                             result_.arch, c_.seed);
    if (c_.mode == Mode::kHyFL) {
      for (size_t g = 0; g < result_.topology.num_clusters(); ++g) {
        pools_.emplace_back(static_cast<int>(g), c_.pool_cap);
      }
    }
    if (c_.agg.kind == agg::AggregatorKind::kFlTrust) {
      Rng rng(DeriveSeed(c_.seed, "root"));
      root_indices_ = data::RootDataset(data_.train, c_.root_size, rng);
    }
  }

  nn::TrainSpec UnitSpec(uint64_t unit, int round) const {
    nn::TrainSpec spec = c_.train;
    spec.seed = DeriveSeed(c_.seed, "train", unit, static_cast<uint64_t>(round));
    return spec;
  }

  bool IsMalicious(uint64_t client) const {
    return std::binary_search(result_.malicious.begin(), result_.malicious.end(), client);
  }

  // Does source `id` (a cluster in HyFL, a client otherwise) include an
  // attacker?
  bool SourceMalicious(uint64_t id) const {
    if (c_.mode != Mode::kHyFL) return IsMalicious(id);
    for (uint64_t client : result_.topology.clusters[id].clients) {
      if (IsMalicious(client)) return true;
    }
    return false;
  }

  template <class Side>
  void Loop(Side& side, mpc::CostMeter& meter) {
    using Value = typename Side::Value;
    const Topology& topo = result_.topology;
    const bool hyfl = c_.mode == Mode::kHyFL;

    Rng init_rng(DeriveSeed(c_.seed, "init"));
    const nn::Model m0 = nn::Model::Initialize(result_.arch, init_rng);
    Value model = side.Init(m0, init_rng);

    std::vector<uint64_t> all_clients(c_.total_clients);
    for (size_t i = 0; i < all_clients.size(); ++i) all_clients[i] = i;

    for (int t = 1; t <= c_.rounds; ++t) {
      const auto before = meter.totals();

      // Training units in ascending id order.
      std::vector<uint64_t> units;
      std::vector<std::vector<uint64_t>> sampled;
      if (hyfl) {
        for (size_t cl = 0; cl < topo.num_clusters(); ++cl) {
          units.push_back(cl);
          sampled.push_back(data::SampleClients(topo.clusters[cl].clients,
                                                topo.sampled_per_cluster, c_.seed,
                                                static_cast<int>(cl), t));
        }
      } else {
        units = data::SampleClients(all_clients, c_.clients_per_round, c_.seed, -1, t);
        std::sort(units.begin(), units.end());
      }

      std::vector<Value> trained(units.size());
      std::vector<double> weights(units.size());
      RunUnits(units.size(), c_.parallel, [&](size_t i) {
        const uint64_t unit = units[i];
        Rng rng(DeriveSeed(c_.seed, "unit", unit, static_cast<uint64_t>(t)));
        if (hyfl) {
          Pool& pool = pools_[unit];
          for (uint64_t client : sampled[i]) {
            const data::ClientShard& shard = shards_[client];
            side.ShareClientData(shard, data_.train, static_cast<int>(unit), rng);
            pool.Add(t, static_cast<int>(unit), PoolItem{client, shard.indices, shard.labels},
                     shard.size());
          }
          trained[i] = side.TrainCluster(model, static_cast<int>(unit),
                                         PoolExamples(pool, data_.train), UnitSpec(unit, t), rng);
          weights[i] = static_cast<double>(pool.sample_count());
        } else {
          const data::ClientShard& shard = shards_[unit];
          trained[i] = side.TrainClient(model, unit, shard.View(data_.train), UnitSpec(unit, t),
                                        rng);
          weights[i] = static_cast<double>(shard.size());
        }
      });
      if (!hyfl) side.EndClientRound();

      Rng agg_rng(DeriveSeed(c_.seed, "aggregate", 0, static_cast<uint64_t>(t)));
      auto domain = side.MakeDomain(agg_rng);
      const bool delta = c_.agg_target == AggTarget::kDelta;
      agg::AggregationInput<typename Side::Domain> input;
      input.source_ids = units;
      input.weights = weights;
      input.seed = DeriveSeed(c_.seed, "tm-variant", 0, static_cast<uint64_t>(t));
      for (auto& w : trained) {
        input.updates.push_back(delta ? domain.Sub(w, model) : std::move(w));
      }
      std::optional<Value> root;
      if (c_.agg.kind == agg::AggregatorKind::kFlTrust) {
        nn::Examples root_ex = data_.train.View(root_indices_);
        nn::TrainSpec spec = c_.train;
        spec.seed = DeriveSeed(c_.seed, "root-train", 0, static_cast<uint64_t>(t));
        Value r = side.TrainRoot(model, root_ex, spec, agg_rng);
        root = delta ? domain.Sub(r, model) : std::move(r);
        input.root_update = &*root;
      }
      const auto agg_before = meter.totals();
      auto out = agg::Aggregate(domain, c_.agg, input);
      const auto agg_spent = meter.totals() - agg_before;
      model = delta ? domain.Add(model, out.update) : std::move(out.update);

      const auto spent = meter.totals() - before;
      RoundMetrics rm;
      rm.round = t;
      rm.aggregator = std::string(agg::ToString(c_.agg.kind));
      rm.attack = std::string(attacks::ToString(c_.attack.kind));
      rm.rate = c_.attack.kind == attacks::AttackKind::kNone ? 0.0 : c_.attack.poison_rate;
      rm.placement = JoinPlacement(c_);
      rm.bytes = spent.bytes;
      rm.comparisons = spent.comparisons;
      rm.comm_rounds = spent.rounds;
      rm.tally_comparisons = spent.tally_comparisons;
      rm.beaver_triples = spent.beaver_triples;
      rm.aggregation_bytes = agg_spent.bytes;
      rm.aggregation_rounds = agg_spent.rounds;
      rm.excluded_ids = out.excluded_ids;
      rm.seed = c_.seed;
      rm.source_ids = units;
      rm.trust_scores = out.trust_scores;
      for (uint64_t id : out.excluded_ids) rm.excluded_malicious += SourceMalicious(id) ? 1 : 0;

      const nn::Model revealed(result_.arch, side.Reveal(model));
      rm.accuracy = nn::Accuracy(revealed, test_);
      if (c_.fixed_check_every > 0 && t % c_.fixed_check_every == 0) {
        rm.fixed_accuracy = nn::Accuracy(revealed.ToFixed(), test_);
      }
      result_.metrics.push_back(rm);
      if (on_round_) on_round_(result_.metrics.back());
    }

    if constexpr (std::is_same_v<Value, mpc::ShareSet>) {
      result_.model_shares = std::move(model);
    } else {
      result_.plain_model = std::move(model);
    }
  }

  RunConfig c_;
  const Datasets& data_;
  RoundCallback on_round_;
  TrainingResult result_;
  nn::Examples test_;
  std::vector<data::ClientShard> shards_;
  std::vector<Pool> pools_;
  std::vector<uint32_t> root_indices_;
  mpc::CostMeter plain_meter_;
};

}  // namespace

Topology ConfigureAbstraction(const RunConfig& c) {
  Validate(c);
  Topology topo;
  topo.mode = c.mode;
  if (c.mode == Mode::kHyFL) {
    topo.global = mpc::PartySet{"G", c.global_size};
    topo.sampled_per_cluster = c.sampled_per_cluster;
    topo.data_shared = true;
    const auto groups = PlacementGroups(c);
    for (size_t i = 0; i < groups.size(); ++i) {
      topo.clusters.push_back(
          Cluster{mpc::PartySet{"E" + std::to_string(i), c.committee_size}, groups[i]});
    }
    return topo;
  }
  // Flat FL: each client is a one-member cluster that is its own committee.
  topo.global = mpc::PartySet{"G", c.mode == Mode::kFlatSingle ? 1 : c.global_size};
  topo.sampled_per_cluster = 0;
  topo.data_shared = false;
  for (uint64_t id = 0; id < c.total_clients; ++id) {
    topo.clusters.push_back(Cluster{mpc::PartySet{ClientParty(id), 1}, {id}});
  }
  return topo;
}

std::vector<std::vector<uint64_t>> PlacementGroups(const RunConfig& c) {
  HYFL_ENFORCE(c.clusters >= 1 && c.total_clients % c.clusters == 0, Error,
               "clients.total must be a multiple of hyfl.clusters");
  const size_t per = c.total_clients / c.clusters;
  std::vector<std::vector<uint64_t>> groups(c.clusters);
  for (size_t g = 0; g < c.clusters; ++g) {
    for (size_t j = 0; j < per; ++j) groups[g].push_back(g * per + j);
  }
  return groups;
}

nn::Model TrainingResult::RevealForMetrics() const {
  if (plain_model) return nn::Model(arch, *plain_model);
  HYFL_ENFORCE(engine != nullptr && model_shares.has_value(), Error, "no trained model");
  return nn::Model(arch, engine->Reveal(*model_shares, mpc::Receiver::Metrics()).Decode());
}

Datasets LoadDatasets(const RunConfig& c) {
  Datasets d;
  d.train = data::LoadIdx(c.data.train_images, c.data.train_labels);
  d.test = data::LoadIdx(c.data.test_images, c.data.test_labels);
  if (c.data.train_limit > 0) d.train = data::Head(d.train, c.data.train_limit);
  if (c.data.test_limit > 0) d.test = data::Head(d.test, c.data.test_limit);
  return d;
}

TrainingResult RunTraining(const RunConfig& config, const Datasets& data,
                           const RoundCallback& on_round) {
  return Runner(config, data, on_round).Run();
}

TrainingResult RunTraining(const RunConfig& config) {
  Validate(config);
  const Datasets data = LoadDatasets(config);
  return RunTraining(config, data);
}

std::vector<std::filesystem::path> WriteFinalModel(const TrainingResult& result,
                                                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  if (result.plain_model) {
    paths.push_back(dir / "final.ckpt");
    nn::SaveCheckpoint(nn::Model(result.arch, *result.plain_model), paths.back());
    return paths;
  }
  HYFL_ENFORCE(result.model_shares.has_value(), Error, "no trained model");
  const mpc::ShareSet& shares = *result.model_shares;
  for (int i = 0; i < shares.parties(); ++i) {
    paths.push_back(dir / ("final-" + shares.owner() + "-" + std::to_string(i) + ".ckpt"));
    nn::SaveCheckpoint(nn::Model(result.arch, shares.share(i)), paths.back());
  }
  return paths;
}

InferenceService::InferenceService(TrainingResult& result, int cluster)
    : result_(result), rng_(DeriveSeed(result.config.seed, "inference", cluster)) {
  const Topology& topo = result.topology;
  if (!result.model_shares) return;
  if (topo.data_shared) {
    HYFL_ENFORCE(cluster >= 0 && static_cast<size_t>(cluster) < topo.num_clusters(), Error,
                 "no cluster " + std::to_string(cluster));
    committee_ = topo.clusters[cluster].committee.id;
    mpc::ShareSet copy = *result.model_shares;
    model_ = result.engine->Reshare(copy, topo.global.id, committee_, rng_);
  } else {
    // Flat FL has no cluster committees; G serves queries.
    committee_ = topo.global.id;
    model_ = *result.model_shares;
  }
}

std::vector<int> InferenceService::Query(uint64_t client_id, const nn::Examples& queries) {
  std::vector<int> labels;
  if (queries.size() == 0) return labels;
  const size_t features = result_.arch.input_shape().size();
  HYFL_ENFORCE(queries.sample_size == features, ShapeError,
               "query samples have " + std::to_string(queries.sample_size) +
                   " features, model expects " + std::to_string(features));
  const size_t classes = static_cast<size_t>(result_.arch.num_classes());

  auto argmax = [](const double* s, size_t n) {
    return static_cast<int>(std::max_element(s, s + n) - s);
  };

  if (!model_) {
    const nn::Model m(result_.arch, *result_.plain_model);
    for (const float* x : queries.features) {
      const auto s = nn::Predict(m, x);
      labels.push_back(argmax(s.data(), s.size()));
    }
    return labels;
  }

  mpc::SharingEngine& engine = *result_.engine;
  std::vector<double> flat;
  flat.reserve(queries.size() * features);
  for (const float* x : queries.features) flat.insert(flat.end(), x, x + features);
  const mpc::ShareSet q =
      engine.Share(FixedVec::Encode(flat), committee_, rng_, ClientParty(client_id));

  // Prediction functionality of the committee.
  const nn::Model m(result_.arch, engine.OpenInFunctionality(*model_, "predict"));
  const std::vector<double> opened = engine.OpenInFunctionality(q, "predict").Decode();
  std::vector<float> sample(features);
  std::vector<double> scores;
  scores.reserve(queries.size() * classes);
  for (size_t i = 0; i < queries.size(); ++i) {
    std::copy_n(opened.begin() + static_cast<std::ptrdiff_t>(i * features), features,
                sample.begin());
    const auto s = nn::Predict(m, sample.data());
    scores.insert(scores.end(), s.begin(), s.end());
  }
  const mpc::ShareSet out =
      engine.ShareFromFunctionality(FixedVec::Encode(scores), committee_, rng_, "predict");

  const std::vector<double> revealed =
      engine.Reveal(out, mpc::Receiver::Client(client_id)).Decode();
  for (size_t i = 0; i < queries.size(); ++i) {
    labels.push_back(argmax(revealed.data() + i * classes, classes));
  }
  return labels;
}

}  // namespace hyfl::core
