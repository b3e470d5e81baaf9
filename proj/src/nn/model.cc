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

#include "hyfl/nn/model.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "hyfl/common/error.h"

namespace hyfl::nn {
namespace {

constexpr char kMagic[8] = {'H', 'Y', 'F', 'L', 'C', 'K', 'P', 'T'};

void PutU64(std::ostream& out, uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

uint64_t GetU64(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  HYFL_ENFORCE(in.gcount() == 8, FormatError, "truncated checkpoint");
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

}  // namespace

Model::Model(Architecture arch, std::vector<double> params)
    : arch_(std::move(arch)), params_(std::move(params)) {
  HYFL_ENFORCE(float_params().size() == arch_.param_count(), ShapeError,
               "parameter count " + std::to_string(float_params().size()) +
                   " does not match architecture (" +
                   std::to_string(arch_.param_count()) + ")");
}

Model::Model(Architecture arch, ring::FixedVec params)
    : arch_(std::move(arch)), params_(std::move(params)) {
  HYFL_ENFORCE(fixed_params().size() == arch_.param_count(), ShapeError,
               "parameter count " + std::to_string(fixed_params().size()) +
                   " does not match architecture (" +
                   std::to_string(arch_.param_count()) + ")");
}

Model Model::Initialize(const Architecture& arch, Rng& rng) {
  std::vector<double> params(arch.param_count(), 0.0);
  for (size_t i = 0; i < arch.layers().size(); ++i) {
    const LayerSpec& l = arch.layers()[i];
    size_t fan_in = 0, weights = 0;
    if (l.kind == LayerKind::kDense) {
      fan_in = static_cast<size_t>(l.in);
      weights = fan_in * static_cast<size_t>(l.out);
    } else if (l.kind == LayerKind::kConv2d) {
      fan_in = static_cast<size_t>(l.in) * l.kernel * l.kernel;
      weights = fan_in * static_cast<size_t>(l.out);
    } else {
      continue;
    }
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    double* w = params.data() + arch.param_offset(i);
    for (size_t k = 0; k < weights; ++k) w[k] = rng.Uniform(-limit, limit);
  }
  return Model(arch, std::move(params));
}

Model Model::Zeros(const Architecture& arch, NumericBackend backend) {
  if (backend == NumericBackend::kFixed) {
    return Model(arch, ring::FixedVec(arch.param_count()));
  }
  return Model(arch, std::vector<double>(arch.param_count(), 0.0));
}

NumericBackend Model::backend() const {
  return std::holds_alternative<ring::FixedVec>(params_) ? NumericBackend::kFixed
                                                         : NumericBackend::kFloat;
}

const std::vector<double>& Model::float_params() const {
  HYFL_ENFORCE(backend() == NumericBackend::kFloat, ShapeError,
               "model holds fixed-point parameters");
  return std::get<std::vector<double>>(params_);
}

std::vector<double>& Model::mutable_float_params() {
  HYFL_ENFORCE(backend() == NumericBackend::kFloat, ShapeError,
               "model holds fixed-point parameters");
  return std::get<std::vector<double>>(params_);
}

const ring::FixedVec& Model::fixed_params() const {
  HYFL_ENFORCE(backend() == NumericBackend::kFixed, ShapeError,
               "model holds float parameters");
  return std::get<ring::FixedVec>(params_);
}

ring::FixedVec& Model::mutable_fixed_params() {
  HYFL_ENFORCE(backend() == NumericBackend::kFixed, ShapeError,
               "model holds float parameters");
  return std::get<ring::FixedVec>(params_);
}

Model Model::ToFixed(int frac_bits) const {
  if (backend() == NumericBackend::kFixed) {
    HYFL_ENFORCE(fixed_params().frac_bits() == frac_bits, ShapeError,
                 "model already fixed-point at a different precision");
    return *this;
  }
  return Model(arch_, ring::FixedVec::Encode(float_params(), frac_bits));
}

Model Model::ToFloat() const {
  if (backend() == NumericBackend::kFloat) return *this;
  return Model(arch_, fixed_params().Decode());
}

std::vector<double> Model::Decoded() const {
  return backend() == NumericBackend::kFloat ? float_params()
                                             : fixed_params().Decode();
}

void SaveCheckpoint(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  HYFL_ENFORCE(out.good(), RuntimeFailure, "cannot write " + path.string());
  const std::string desc = model.arch().Describe();
  out.write(kMagic, sizeof(kMagic));
  PutU64(out, desc.size());
  out.write(desc.data(), static_cast<std::streamsize>(desc.size()));
  const bool fixed = model.backend() == NumericBackend::kFixed;
  PutU64(out, fixed ? 1 : 0);
  PutU64(out, fixed ? static_cast<uint64_t>(model.fixed_params().frac_bits()) : 0);
  PutU64(out, model.param_count());
  if (fixed) {
    for (uint64_t v : model.fixed_params().raw()) PutU64(out, v);
  } else {
    for (double v : model.float_params()) PutU64(out, std::bit_cast<uint64_t>(v));
  }
  HYFL_ENFORCE(out.good(), RuntimeFailure, "write failed for " + path.string());
}

Model LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  HYFL_ENFORCE(in.good(), FormatError, "cannot open " + path.string());
  char magic[8];
  in.read(magic, 8);
  HYFL_ENFORCE(in.gcount() == 8 && std::memcmp(magic, kMagic, 8) == 0,
               FormatError, "not a checkpoint: " + path.string());
  const uint64_t desc_len = GetU64(in);
  HYFL_ENFORCE(desc_len < (1u << 20), FormatError, "implausible descriptor length");
  std::string desc(desc_len, '\0');
  in.read(desc.data(), static_cast<std::streamsize>(desc_len));
  HYFL_ENFORCE(static_cast<uint64_t>(in.gcount()) == desc_len, FormatError,
               "truncated checkpoint");
  const Architecture arch = Architecture::Parse(desc);
  const uint64_t fixed = GetU64(in);
  const auto frac_bits = static_cast<int>(GetU64(in));
  const uint64_t count = GetU64(in);
  HYFL_ENFORCE(count == arch.param_count(), FormatError,
               "checkpoint parameter count does not match its descriptor");
  std::vector<uint64_t> raw(count);
  for (auto& v : raw) v = GetU64(in);
  if (fixed == 1) return Model(arch, ring::FixedVec(std::move(raw), frac_bits));
  HYFL_ENFORCE(fixed == 0, FormatError, "unknown backend tag in checkpoint");
  std::vector<double> params(count);
  for (size_t i = 0; i < count; ++i) params[i] = std::bit_cast<double>(raw[i]);
  return Model(arch, std::move(params));
}

}  // namespace hyfl::nn
