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

// Layer descriptors and the textual architecture format.
//
// Descriptor grammar (whitespace separated, case sensitive):
//
//   input(C,H,W) layer layer ... softmax_ce
//   layer := dense(IN,OUT) | conv2d(IN_CH,OUT_CH,K,STRIDE) | maxpool(K)
//          | relu | flatten
//
// Parameters are laid out in layer order. Dense stores W[in][out] row-major
// followed by b[out]; Conv2d stores W[oc][ic][ky][kx] followed by b[oc].

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace hyfl::nn {

enum class LayerKind { kDense, kConv2d, kMaxPool, kReLU, kFlatten };

struct Shape {
  int channels = 1;
  int height = 1;
  int width = 1;

  size_t size() const {
    return static_cast<size_t>(channels) * static_cast<size_t>(height) *
           static_cast<size_t>(width);
  }
  friend bool operator==(const Shape&, const Shape&) = default;
};

struct LayerSpec {
  LayerKind kind = LayerKind::kReLU;
  // Dense: in/out. Conv2d: in = input channels, out = output channels.
  int in = 0;
  int out = 0;
  int kernel = 0;  // Conv2d kernel size, MaxPool window (= stride)
  int stride = 1;  // Conv2d only

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

class Architecture {
 public:
  // Throws FormatError on syntax errors and ShapeError when adjacent shapes
  // do not compose.
  static Architecture Parse(std::string_view descriptor);

  // 784-128-10 multilayer perceptron on 1x28x28 inputs.
  static Architecture Mlp();
  // Conv(1->6,5)-ReLU-MaxPool2-Conv(6->16,5)-ReLU-MaxPool2-Flatten-
  // Dense(256,120)-ReLU-Dense(120,84)-ReLU-Dense(84,10).
  static Architecture LeNet();
  // "mlp", "lenet" or a full descriptor.
  static Architecture FromName(std::string_view name_or_descriptor);

  Architecture(Shape input, std::vector<LayerSpec> layers);

  std::string Describe() const;

  const Shape& input_shape() const { return input_; }
  const std::vector<LayerSpec>& layers() const { return layers_; }
  // Output shape of layer i.
  const Shape& output_shape(size_t i) const { return shapes_.at(i); }
  int num_classes() const { return static_cast<int>(shapes_.back().size()); }

  size_t param_count() const { return param_count_; }
  // Offset of layer i's parameters in the flat vector.
  size_t param_offset(size_t i) const { return offsets_.at(i); }
  size_t layer_param_count(size_t i) const;

  friend bool operator==(const Architecture& a, const Architecture& b) {
    return a.input_ == b.input_ && a.layers_ == b.layers_;
  }

 private:
  Shape input_;
  std::vector<LayerSpec> layers_;
  std::vector<Shape> shapes_;
  std::vector<size_t> offsets_;
  size_t param_count_ = 0;
};

}  // namespace hyfl::nn
