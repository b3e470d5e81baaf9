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

// Mini-batch SGD, inference and exact gradients over either numeric backend.
//
// The fixed-point backend mirrors how an MPC engine evaluates the network:
// every dot product and every gradient sum is accumulated in the 64-bit
// ring and truncated once; ReLU and max-pool compare in signed ring order.
// The softmax cross-entropy head is evaluated on decoded logits and its
// gradient re-encoded.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hyfl/nn/model.h"

namespace hyfl::nn {

// Borrowed view of labelled samples. Each feature pointer addresses
// `sample_size` floats owned elsewhere (typically the dataset store).
struct Examples {
  size_t sample_size = 0;
  std::vector<const float*> features;
  std::vector<int> labels;

  size_t size() const { return labels.size(); }
  void Add(const float* x, int label) {
    features.push_back(x);
    labels.push_back(label);
  }
};

struct TrainSpec {
  int epochs = 5;
  int batch_size = 8;
  double learning_rate = 0.005;
  double momentum = 0.0;
  double weight_decay = 0.0;
  uint64_t seed = 1;
};

// `epochs` passes of mini-batch SGD over a seeded shuffle; the final
// partial batch is kept. Update: v = momentum * v + g + wd * w;
// w -= lr * v. Deterministic given inputs.
Model Train(const Model& model, const Examples& data, const TrainSpec& spec);

// Class scores (logits) for one sample.
std::vector<double> Predict(const Model& model, const float* features);
// Argmax per sample, ties to the lowest index.
std::vector<int> PredictLabels(const Model& model, const Examples& data);
double Accuracy(const Model& model, const Examples& data);

struct GradientResult {
  std::vector<double> gradient;  // d(mean cross-entropy)/d(params)
  double loss = 0.0;             // mean cross-entropy
};
GradientResult Gradient(const Model& model, const Examples& data);
double MeanLoss(const Model& model, const Examples& data);

}  // namespace hyfl::nn
