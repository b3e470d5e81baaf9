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

#include "hyfl/data/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

namespace hyfl::data {
namespace {

constexpr uint32_t kImageMagic = 0x00000803;
constexpr uint32_t kLabelMagic = 0x00000801;

std::vector<unsigned char> ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  HYFL_ENFORCE(in.good(), FormatError, "cannot open IDX file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

uint32_t BigEndian32(const std::vector<unsigned char>& bytes, size_t offset,
                     const std::filesystem::path& path) {
  HYFL_ENFORCE(offset + 4 <= bytes.size(), FormatError,
               "truncated IDX header in " + path.string());
  return (uint32_t{bytes[offset]} << 24) | (uint32_t{bytes[offset + 1]} << 16) |
         (uint32_t{bytes[offset + 2]} << 8) | uint32_t{bytes[offset + 3]};
}

void PutBigEndian32(std::ostream& out, uint32_t v) {
  const char bytes[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                         static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(bytes, 4);
}

}  // namespace

nn::Examples Dataset::AllExamples() const {
  nn::Examples out;
  out.sample_size = sample_size();
  for (size_t i = 0; i < size(); ++i) out.Add(sample(i), labels[i]);
  return out;
}

nn::Examples Dataset::View(std::span<const uint32_t> indices) const {
  nn::Examples out;
  out.sample_size = sample_size();
  for (uint32_t i : indices) out.Add(sample(i), labels.at(i));
  return out;
}

nn::Examples ClientShard::View(const Dataset& data) const {
  nn::Examples out;
  out.sample_size = data.sample_size();
  for (size_t k = 0; k < indices.size(); ++k) out.Add(data.sample(indices[k]), labels[k]);
  return out;
}

Dataset LoadIdx(const std::filesystem::path& images,
                const std::filesystem::path& labels) {
  const auto img = ReadAll(images);
  const auto lab = ReadAll(labels);
  HYFL_ENFORCE(BigEndian32(img, 0, images) == kImageMagic, FormatError,
               "bad image magic in " + images.string());
  HYFL_ENFORCE(BigEndian32(lab, 0, labels) == kLabelMagic, FormatError,
               "bad label magic in " + labels.string());
  const uint32_t count = BigEndian32(img, 4, images);
  const uint32_t rows = BigEndian32(img, 8, images);
  const uint32_t cols = BigEndian32(img, 12, images);
  const uint32_t label_count = BigEndian32(lab, 4, labels);
  HYFL_ENFORCE(count == label_count, FormatError,
               "image count " + std::to_string(count) + " differs from label count " +
                   std::to_string(label_count));
  const size_t pixels = static_cast<size_t>(rows) * cols;
  HYFL_ENFORCE(img.size() >= 16 + pixels * count, FormatError,
               "truncated image data in " + images.string());
  HYFL_ENFORCE(lab.size() >= 8 + static_cast<size_t>(count), FormatError,
               "truncated label data in " + labels.string());

  Dataset out;
  out.sample_shape = {1, static_cast<int>(rows), static_cast<int>(cols)};
  out.features.resize(pixels * count);
  for (size_t i = 0; i < out.features.size(); ++i) {
    out.features[i] = static_cast<float>(img[16 + i]) / 255.0f;
  }
  out.labels.resize(count);
  int max_label = 0;
  for (size_t i = 0; i < count; ++i) {
    out.labels[i] = lab[8 + i];
    max_label = std::max(max_label, out.labels[i]);
  }
  out.num_classes = std::max(10, max_label + 1);
  return out;
}

void WriteIdxImages(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  HYFL_ENFORCE(out.good(), RuntimeFailure, "cannot write " + path.string());
  PutBigEndian32(out, kImageMagic);
  PutBigEndian32(out, static_cast<uint32_t>(data.size()));
  PutBigEndian32(out, static_cast<uint32_t>(data.sample_shape.height));
  PutBigEndian32(out, static_cast<uint32_t>(data.sample_shape.width));
  for (float v : data.features) {
    out.put(static_cast<char>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)));
  }
}

void WriteIdxLabels(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  HYFL_ENFORCE(out.good(), RuntimeFailure, "cannot write " + path.string());
  PutBigEndian32(out, kLabelMagic);
  PutBigEndian32(out, static_cast<uint32_t>(data.size()));
  for (int l : data.labels) out.put(static_cast<char>(l));
}

Dataset Head(const Dataset& data, size_t limit) {
  if (limit == 0 || limit >= data.size()) return data;
  Dataset out;
  out.sample_shape = data.sample_shape;
  out.num_classes = data.num_classes;
  out.features.assign(data.features.begin(),
                      data.features.begin() + static_cast<std::ptrdiff_t>(limit * data.sample_size()));
  out.labels.assign(data.labels.begin(), data.labels.begin() + static_cast<std::ptrdiff_t>(limit));
  return out;
}

std::vector<ClientShard> ShardClients(const Dataset& data, size_t num_clients,
                                      size_t shard_size, uint64_t master_seed) {
  HYFL_ENFORCE(data.size() > 0, Error, "cannot shard an empty dataset");
  HYFL_ENFORCE(shard_size >= 1 && shard_size <= data.size(), Error,
               "shard size " + std::to_string(shard_size) + " exceeds dataset size " +
                   std::to_string(data.size()));
  std::vector<ClientShard> shards(num_clients);
  for (size_t c = 0; c < num_clients; ++c) {
    Rng rng(DeriveSeed(master_seed, "shard", c));
    ClientShard& s = shards[c];
    s.client_id = c;
    for (size_t idx : rng.SampleWithoutReplacement(data.size(), shard_size)) {
      s.indices.push_back(static_cast<uint32_t>(idx));
      s.labels.push_back(data.labels[idx]);
    }
  }
  return shards;
}

std::vector<uint64_t> SampleClients(std::span<const uint64_t> members, size_t k,
                                    uint64_t master_seed, int cluster_id, int round) {
  HYFL_ENFORCE(members.size() >= k, Error,
               "cluster " + std::to_string(cluster_id) + " has " +
                   std::to_string(members.size()) + " clients, fewer than the " +
                   std::to_string(k) + " sampled per round");
  Rng rng(DeriveSeed(master_seed, "sample", static_cast<uint64_t>(cluster_id),
                     static_cast<uint64_t>(round)));
  std::vector<uint64_t> out;
  for (size_t i : rng.SampleWithoutReplacement(members.size(), k)) out.push_back(members[i]);
  return out;
}

std::vector<uint32_t> RootDataset(const Dataset& data, size_t size, Rng& rng) {
  HYFL_ENFORCE(size >= 1, Error, "root dataset size must be positive");
  HYFL_ENFORCE(size <= data.size(), Error,
               "root dataset size " + std::to_string(size) + " exceeds dataset size " +
                   std::to_string(data.size()));
  std::vector<uint32_t> out;
  for (size_t i : rng.SampleWithoutReplacement(data.size(), size)) {
    out.push_back(static_cast<uint32_t>(i));
  }
  return out;
}

}  // namespace hyfl::data
