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

#include "hyfl/nn/architecture.h"

#include <charconv>
#include <sstream>

#include "hyfl/common/error.h"

namespace hyfl::nn {
namespace {

struct Token {
  std::string name;
  std::vector<int> args;
};

Token ParseToken(std::string_view text) {
  Token token;
  const size_t open = text.find('(');
  if (open == std::string_view::npos) {
    token.name = std::string(text);
    return token;
  }
  HYFL_ENFORCE(text.back() == ')', FormatError,
               "unterminated argument list in '" + std::string(text) + "'");
  token.name = std::string(text.substr(0, open));
  std::string_view rest = text.substr(open + 1, text.size() - open - 2);
  while (!rest.empty()) {
    const size_t comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    int value = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    HYFL_ENFORCE(ec == std::errc() && ptr == item.data() + item.size() && value > 0,
                 FormatError,
                 "bad argument '" + std::string(item) + "' in '" + std::string(text) + "'");
    token.args.push_back(value);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return token;
}

void ExpectArgs(const Token& t, size_t n) {
  HYFL_ENFORCE(t.args.size() == n, FormatError,
               t.name + " expects " + std::to_string(n) + " arguments");
}

}  // namespace

Architecture::Architecture(Shape input, std::vector<LayerSpec> layers)
    : input_(input), layers_(std::move(layers)) {
  HYFL_ENFORCE(!layers_.empty(), ShapeError, "architecture without layers");
  Shape s = input_;
  for (size_t i = 0; i < layers_.size(); ++i) {
    const LayerSpec& l = layers_[i];
    offsets_.push_back(param_count_);
    const std::string where = "layer " + std::to_string(i) + ": ";
    switch (l.kind) {
      case LayerKind::kDense:
        HYFL_ENFORCE(s.size() == static_cast<size_t>(l.in), ShapeError,
                     where + "dense expects " + std::to_string(l.in) +
                         " inputs, got " + std::to_string(s.size()));
        s = {1, 1, l.out};
        param_count_ += static_cast<size_t>(l.in + 1) * static_cast<size_t>(l.out);
        break;
      case LayerKind::kConv2d: {
        HYFL_ENFORCE(s.channels == l.in, ShapeError,
                     where + "conv2d expects " + std::to_string(l.in) +
                         " channels, got " + std::to_string(s.channels));
        HYFL_ENFORCE(s.height >= l.kernel && s.width >= l.kernel && l.stride >= 1,
                     ShapeError, where + "conv2d kernel larger than input");
        s = {l.out, (s.height - l.kernel) / l.stride + 1,
             (s.width - l.kernel) / l.stride + 1};
        param_count_ += static_cast<size_t>(l.out) *
                        (static_cast<size_t>(l.in) * l.kernel * l.kernel + 1);
        break;
      }
      case LayerKind::kMaxPool:
        HYFL_ENFORCE(l.kernel >= 1 && s.height >= l.kernel && s.width >= l.kernel,
                     ShapeError, where + "maxpool window larger than input");
        s = {s.channels, s.height / l.kernel, s.width / l.kernel};
        break;
      case LayerKind::kReLU:
        break;
      case LayerKind::kFlatten:
        s = {1, 1, static_cast<int>(s.size())};
        break;
    }
    shapes_.push_back(s);
  }
  HYFL_ENFORCE(s.channels == 1 && s.height == 1 && s.size() >= 2, ShapeError,
               "architecture must end in a flat vector of >= 2 class scores");
}

size_t Architecture::layer_param_count(size_t i) const {
  const size_t end = i + 1 < offsets_.size() ? offsets_[i + 1] : param_count_;
  return end - offsets_.at(i);
}

Architecture Architecture::Parse(std::string_view descriptor) {
  std::istringstream in{std::string(descriptor)};
  std::string word;
  std::vector<Token> tokens;
  while (in >> word) tokens.push_back(ParseToken(word));
  HYFL_ENFORCE(tokens.size() >= 3, FormatError,
               "descriptor needs input(...), layers and softmax_ce");
  HYFL_ENFORCE(tokens.front().name == "input", FormatError,
               "descriptor must start with input(C,H,W)");
  ExpectArgs(tokens.front(), 3);
  HYFL_ENFORCE(tokens.back().name == "softmax_ce" && tokens.back().args.empty(),
               FormatError, "descriptor must end with softmax_ce");
  const Shape input{tokens[0].args[0], tokens[0].args[1], tokens[0].args[2]};
  std::vector<LayerSpec> layers;
  for (size_t i = 1; i + 1 < tokens.size(); ++i) {
    const Token& t = tokens[i];
    LayerSpec l;
    if (t.name == "dense") {
      ExpectArgs(t, 2);
      l = {LayerKind::kDense, t.args[0], t.args[1], 0, 1};
    } else if (t.name == "conv2d") {
      ExpectArgs(t, 4);
      l = {LayerKind::kConv2d, t.args[0], t.args[1], t.args[2], t.args[3]};
    } else if (t.name == "maxpool") {
      ExpectArgs(t, 1);
      l = {LayerKind::kMaxPool, 0, 0, t.args[0], t.args[0]};
    } else if (t.name == "relu") {
      ExpectArgs(t, 0);
      l.kind = LayerKind::kReLU;
    } else if (t.name == "flatten") {
      ExpectArgs(t, 0);
      l.kind = LayerKind::kFlatten;
    } else {
      throw FormatError("unknown layer '" + t.name + "'");
    }
    layers.push_back(l);
  }
  return Architecture(input, std::move(layers));
}

std::string Architecture::Describe() const {
  std::ostringstream out;
  out << "input(" << input_.channels << ',' << input_.height << ','
      << input_.width << ')';
  for (const LayerSpec& l : layers_) {
    out << ' ';
    switch (l.kind) {
      case LayerKind::kDense:
        out << "dense(" << l.in << ',' << l.out << ')';
        break;
      case LayerKind::kConv2d:
        out << "conv2d(" << l.in << ',' << l.out << ',' << l.kernel << ','
            << l.stride << ')';
        break;
      case LayerKind::kMaxPool:
        out << "maxpool(" << l.kernel << ')';
        break;
      case LayerKind::kReLU:
        out << "relu";
        break;
      case LayerKind::kFlatten:
        out << "flatten";
        break;
    }
  }
  out << " softmax_ce";
  return out.str();
}

Architecture Architecture::Mlp() {
  return Parse("input(1,28,28) flatten dense(784,128) relu dense(128,10) softmax_ce");
}

Architecture Architecture::LeNet() {
  return Parse(
      "input(1,28,28) conv2d(1,6,5,1) relu maxpool(2) conv2d(6,16,5,1) relu "
      "maxpool(2) flatten dense(256,120) relu dense(120,84) relu dense(84,10) "
      "softmax_ce");
}

Architecture Architecture::FromName(std::string_view name) {
  if (name == "mlp") return Mlp();
  if (name == "lenet") return LeNet();
  return Parse(name);
}

}  // namespace hyfl::nn
