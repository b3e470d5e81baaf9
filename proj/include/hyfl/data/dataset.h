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

#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hyfl/common/error.h"
#include "hyfl/common/rng.h"
#include "hyfl/nn/architecture.h"
#include "hyfl/nn/trainer.h"

namespace hyfl::data {

// Immutable sample store: row-major float features plus integer labels.
struct Dataset {
  nn::Shape sample_shape;
  int num_classes = 10;
  std::vector<float> features;
  std::vector<int> labels;

  size_t size() const { return labels.size(); }
  size_t sample_size() const { return sample_shape.size(); }
  const float* sample(size_t i) const { return features.data() + i * sample_size(); }

  // Borrowed view over all samples with their stored labels.
  nn::Examples AllExamples() const;
  // Borrowed view over `indices` with the matching stored labels.
  nn::Examples View(std::span<const uint32_t> indices) const;
};

// Reads an IDX image file (magic 2051, u8 pixels, big-endian dims) and its
// label file (magic 2049). Pixels are scaled by 1/255.
Dataset LoadIdx(const std::filesystem::path& images,
                const std::filesystem::path& labels);

// IDX writers (used for fixtures and derived subsets).
void WriteIdxImages(const std::filesystem::path& path, const Dataset& data);
void WriteIdxLabels(const std::filesystem::path& path, const Dataset& data);

// First `limit` samples (all when limit is 0 or exceeds the size).
Dataset Head(const Dataset& data, size_t limit);

struct ClientShard {
  uint64_t client_id = 0;
  int cluster_id = -1;
  std::vector<uint32_t> indices;
  std::vector<int> labels;  // possibly rewritten by an attack
  bool poisoned = false;

  size_t size() const { return indices.size(); }
  nn::Examples View(const Dataset& data) const;
};

// Each client draws `shard_size` distinct samples from its own seeded
// stream; different clients may share samples.
std::vector<ClientShard> ShardClients(const Dataset& data, size_t num_clients,
                                      size_t shard_size, uint64_t master_seed);

// Uniform sample of `k` distinct members, deterministic in
// (master_seed, cluster_id, round).
std::vector<uint64_t> SampleClients(std::span<const uint64_t> members, size_t k,
                                    uint64_t master_seed, int cluster_id, int round);

// Uniform sample of `size` distinct dataset indices for FLTrust.
std::vector<uint32_t> RootDataset(const Dataset& data, size_t size, Rng& rng);

// Per-cluster accumulation of contributed data across rounds. With a cap
// (in samples), whole entries are evicted oldest first until the pool fits.
template <class Payload>
class ClusterPool {
 public:
  struct Entry {
    int round;
    size_t samples;
    Payload payload;
  };

  explicit ClusterPool(int cluster_id, size_t cap = 0)
      : cluster_id_(cluster_id), cap_(cap) {}

  void Add(int round, int cluster_id, Payload payload, size_t samples) {
    HYFL_ENFORCE(cluster_id == cluster_id_, Error,
                 "shard of cluster " + std::to_string(cluster_id) +
                     " offered to pool of cluster " + std::to_string(cluster_id_));
    entries_.push_back({round, samples, std::move(payload)});
    samples_ += samples;
    while (cap_ != 0 && samples_ > cap_ && !entries_.empty()) {
      samples_ -= entries_.front().samples;
      entries_.pop_front();
    }
  }

  int cluster_id() const { return cluster_id_; }
  size_t cap() const { return cap_; }
  size_t sample_count() const { return samples_; }
  const std::deque<Entry>& entries() const { return entries_; }

 private:
  int cluster_id_;
  size_t cap_;
  size_t samples_ = 0;
  std::deque<Entry> entries_;
};

}  // namespace hyfl::data
