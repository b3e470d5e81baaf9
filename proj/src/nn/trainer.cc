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

#include "hyfl/nn/trainer.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "hyfl/common/error.h"

namespace hyfl::nn {
namespace {

// Numeric policies. Accumulators hold products at double scale (2f for the
// ring); Fin brings them back to value scale.
struct FloatPolicy {
  using T = double;
  T Fin(T acc) const { return acc; }
  T One() const { return 1.0; }
  bool Positive(T x) const { return x > 0; }
  bool Greater(T a, T b) const { return a > b; }
  T FromDouble(double x) const { return x; }
  double ToDouble(T x) const { return x; }
};

struct FixedPolicy {
  using T = uint64_t;
  int f = ring::kDefaultFracBits;
  T Fin(T acc) const { return ring::TruncateRaw(acc, f); }
  T One() const { return uint64_t{1} << f; }
  bool Positive(T x) const { return ring::AsSigned(x) > 0; }
  bool Greater(T a, T b) const { return ring::AsSigned(a) > ring::AsSigned(b); }
  T FromDouble(double x) const { return ring::EncodeRaw(x, f); }
  double ToDouble(T x) const { return ring::DecodeRaw(x, f); }
};

template <class P>
class Net {
 public:
  using T = typename P::T;

  Net(const Architecture& arch, P policy) : arch_(arch), p_(policy) {
    const size_t n = arch_.layers().size();
    act_.resize(n);
    grad_.resize(n);
    argmax_.resize(n);
    size_t widest = arch_.input_shape().size();
    for (size_t l = 0; l < n; ++l) {
      act_[l].resize(arch_.output_shape(l).size());
      grad_[l].resize(arch_.output_shape(l).size());
      widest = std::max(widest, arch_.output_shape(l).size());
      if (arch_.layers()[l].kind == LayerKind::kMaxPool) {
        argmax_[l].resize(arch_.output_shape(l).size());
      }
    }
    scratch_.resize(widest);
  }

  // Logits for one sample; valid until the next call.
  const std::vector<T>& Forward(const T* params, const T* input) {
    const T* x = input;
    Shape in_shape = arch_.input_shape();
    for (size_t l = 0; l < arch_.layers().size(); ++l) {
      const LayerSpec& spec = arch_.layers()[l];
      const T* w = params + arch_.param_offset(l);
      T* y = act_[l].data();
      switch (spec.kind) {
        case LayerKind::kDense:
          DenseForward(spec, w, x, y);
          break;
        case LayerKind::kConv2d:
          ConvForward(spec, in_shape, arch_.output_shape(l), w, x, y);
          break;
        case LayerKind::kMaxPool:
          PoolForward(spec, in_shape, arch_.output_shape(l), x, y, argmax_[l].data());
          break;
        case LayerKind::kReLU:
          for (size_t i = 0; i < act_[l].size(); ++i) y[i] = p_.Positive(x[i]) ? x[i] : T{0};
          break;
        case LayerKind::kFlatten:
          std::copy(x, x + act_[l].size(), y);
          break;
      }
      x = y;
      in_shape = arch_.output_shape(l);
    }
    return act_.back();
  }

  // Backpropagates `dlogits` (value scale) through the activations of the
  // last Forward and adds double-scale parameter gradients to `gacc`.
  void Backward(const T* params, const T* input, const T* dlogits, T* gacc) {
    const size_t n = arch_.layers().size();
    std::copy(dlogits, dlogits + grad_[n - 1].size(), grad_[n - 1].begin());
    for (size_t l = n; l-- > 0;) {
      const LayerSpec& spec = arch_.layers()[l];
      const T* x = l == 0 ? input : act_[l - 1].data();
      const Shape in_shape = l == 0 ? arch_.input_shape() : arch_.output_shape(l - 1);
      const T* dy = grad_[l].data();
      T* dx = l == 0 ? nullptr : grad_[l - 1].data();
      const T* w = params + arch_.param_offset(l);
      T* g = gacc + arch_.param_offset(l);
      switch (spec.kind) {
        case LayerKind::kDense:
          DenseBackward(spec, w, x, dy, dx, g);
          break;
        case LayerKind::kConv2d:
          ConvBackward(spec, in_shape, arch_.output_shape(l), w, x, dy, dx, g);
          break;
        case LayerKind::kMaxPool:
          if (dx != nullptr) {
            std::fill(dx, dx + in_shape.size(), T{0});
            for (size_t i = 0; i < grad_[l].size(); ++i) dx[argmax_[l][i]] += dy[i];
          }
          break;
        case LayerKind::kReLU:
          if (dx != nullptr) {
            for (size_t i = 0; i < grad_[l].size(); ++i) {
              dx[i] = p_.Positive(x[i]) ? dy[i] : T{0};
            }
          }
          break;
        case LayerKind::kFlatten:
          if (dx != nullptr) std::copy(dy, dy + grad_[l].size(), dx);
          break;
      }
    }
  }

 private:
  void DenseForward(const LayerSpec& s, const T* w, const T* x, T* y) {
    const size_t in = static_cast<size_t>(s.in), out = static_cast<size_t>(s.out);
    T* acc = scratch_.data();
    std::fill(acc, acc + out, T{0});
    for (size_t i = 0; i < in; ++i) {
      const T xi = x[i];
      if (xi == T{0}) continue;  // sparse inputs (image background)
      const T* row = w + i * out;
      for (size_t o = 0; o < out; ++o) acc[o] += xi * row[o];
    }
    const T* b = w + in * out;
    for (size_t o = 0; o < out; ++o) y[o] = p_.Fin(acc[o]) + b[o];
  }

  void DenseBackward(const LayerSpec& s, const T* w, const T* x, const T* dy,
                     T* dx, T* g) {
    const size_t in = static_cast<size_t>(s.in), out = static_cast<size_t>(s.out);
    for (size_t i = 0; i < in; ++i) {
      const T xi = x[i];
      if (xi == T{0}) continue;
      T* grow = g + i * out;
      for (size_t o = 0; o < out; ++o) grow[o] += xi * dy[o];
    }
    T* gb = g + in * out;
    const T one = p_.One();
    for (size_t o = 0; o < out; ++o) gb[o] += dy[o] * one;
    if (dx == nullptr) return;
    for (size_t i = 0; i < in; ++i) {
      const T* row = w + i * out;
      T acc{0};
      for (size_t o = 0; o < out; ++o) acc += row[o] * dy[o];
      dx[i] = p_.Fin(acc);
    }
  }

  void ConvForward(const LayerSpec& s, const Shape& in, const Shape& out,
                   const T* w, const T* x, T* y) {
    const int k = s.kernel, st = s.stride;
    const size_t plane = static_cast<size_t>(out.height) * out.width;
    const T* bias = w + static_cast<size_t>(s.out) * s.in * k * k;
    T* acc = scratch_.data();
    for (int oc = 0; oc < s.out; ++oc) {
      std::fill(acc, acc + plane, T{0});
      for (int ic = 0; ic < s.in; ++ic) {
        const T* xin = x + static_cast<size_t>(ic) * in.height * in.width;
        for (int ky = 0; ky < k; ++ky) {
          for (int kx = 0; kx < k; ++kx) {
            const T wv = w[((static_cast<size_t>(oc) * s.in + ic) * k + ky) * k + kx];
            for (int oy = 0; oy < out.height; ++oy) {
              const T* xrow = xin + static_cast<size_t>(oy * st + ky) * in.width + kx;
              T* arow = acc + static_cast<size_t>(oy) * out.width;
              for (int ox = 0; ox < out.width; ++ox) arow[ox] += wv * xrow[ox * st];
            }
          }
        }
      }
      T* yc = y + static_cast<size_t>(oc) * plane;
      for (size_t i = 0; i < plane; ++i) yc[i] = p_.Fin(acc[i]) + bias[oc];
    }
  }

  void ConvBackward(const LayerSpec& s, const Shape& in, const Shape& out,
                    const T* w, const T* x, const T* dy, T* dx, T* g) {
    const int k = s.kernel, st = s.stride;
    const size_t plane = static_cast<size_t>(out.height) * out.width;
    T* gbias = g + static_cast<size_t>(s.out) * s.in * k * k;
    T* dacc = scratch_.data();
    if (dx != nullptr) std::fill(dacc, dacc + in.size(), T{0});
    const T one = p_.One();
    for (int oc = 0; oc < s.out; ++oc) {
      const T* dyc = dy + static_cast<size_t>(oc) * plane;
      T bsum{0};
      for (size_t i = 0; i < plane; ++i) bsum += dyc[i];
      gbias[oc] += bsum * one;
      for (int ic = 0; ic < s.in; ++ic) {
        const size_t in_off = static_cast<size_t>(ic) * in.height * in.width;
        for (int ky = 0; ky < k; ++ky) {
          for (int kx = 0; kx < k; ++kx) {
            const size_t widx = ((static_cast<size_t>(oc) * s.in + ic) * k + ky) * k + kx;
            const T wv = w[widx];
            T sum{0};
            for (int oy = 0; oy < out.height; ++oy) {
              const size_t row = in_off + static_cast<size_t>(oy * st + ky) * in.width + kx;
              const T* xrow = x + row;
              const T* drow = dyc + static_cast<size_t>(oy) * out.width;
              for (int ox = 0; ox < out.width; ++ox) sum += drow[ox] * xrow[ox * st];
              if (dx != nullptr) {
                T* darow = dacc + row;
                for (int ox = 0; ox < out.width; ++ox) darow[ox * st] += wv * drow[ox];
              }
            }
            g[widx] += sum;
          }
        }
      }
    }
    if (dx != nullptr) {
      for (size_t i = 0; i < in.size(); ++i) dx[i] = p_.Fin(dacc[i]);
    }
  }

  void PoolForward(const LayerSpec& s, const Shape& in, const Shape& out,
                   const T* x, T* y, uint32_t* arg) {
    const int k = s.kernel;
    for (int c = 0; c < out.channels; ++c) {
      for (int oy = 0; oy < out.height; ++oy) {
        for (int ox = 0; ox < out.width; ++ox) {
          uint32_t best = static_cast<uint32_t>((c * in.height + oy * k) * in.width + ox * k);
          for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
              const auto idx = static_cast<uint32_t>(
                  (c * in.height + oy * k + ky) * in.width + ox * k + kx);
              if (p_.Greater(x[idx], x[best])) best = idx;
            }
          }
          const size_t o = (static_cast<size_t>(c) * out.height + oy) * out.width + ox;
          y[o] = x[best];
          arg[o] = best;
        }
      }
    }
  }

  const Architecture& arch_;
  P p_;
  std::vector<std::vector<T>> act_;
  std::vector<std::vector<T>> grad_;
  std::vector<std::vector<uint32_t>> argmax_;
  std::vector<T> scratch_;
};

void CheckData(const Model& model, const Examples& data) {
  HYFL_ENFORCE(data.features.size() == data.labels.size(), ShapeError,
               "feature and label counts differ");
  HYFL_ENFORCE(data.sample_size == model.arch().input_shape().size(), ShapeError,
               "sample size " + std::to_string(data.sample_size) +
                   " does not match architecture input " +
                   std::to_string(model.arch().input_shape().size()));
  const int classes = model.arch().num_classes();
  for (int label : data.labels) {
    HYFL_ENFORCE(label >= 0 && label < classes, ShapeError,
                 "label " + std::to_string(label) + " outside [0, " +
                     std::to_string(classes) + ")");
  }
}

// Softmax of decoded logits; returns -log p[label].
template <class P>
double Softmax(const P& p, const std::vector<typename P::T>& logits, int label,
               std::vector<double>& probs) {
  probs.resize(logits.size());
  double mx = -INFINITY;
  for (size_t c = 0; c < logits.size(); ++c) {
    probs[c] = p.ToDouble(logits[c]);
    mx = std::max(mx, probs[c]);
  }
  double z = 0;
  for (double& v : probs) {
    v = std::exp(v - mx);
    z += v;
  }
  for (double& v : probs) v /= z;
  return -std::log(std::max(probs[static_cast<size_t>(label)], 1e-300));
}

template <class P>
void LoadInput(const P& p, const float* src, size_t n, std::vector<typename P::T>& dst) {
  dst.resize(n);
  for (size_t i = 0; i < n; ++i) dst[i] = p.FromDouble(static_cast<double>(src[i]));
}

template <class P>
void TrainImpl(const Architecture& arch, std::vector<typename P::T>& w,
               const Examples& data, const TrainSpec& spec, const P& p) {
  using T = typename P::T;
  Net<P> net(arch, p);
  const size_t n = data.size();
  const size_t pc = w.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(spec.seed);
  std::vector<T> gacc(pc), vel(spec.momentum != 0.0 ? pc : 0), input, dlogits;
  std::vector<double> probs;
  const T lr = p.FromDouble(spec.learning_rate);
  const T mom = p.FromDouble(spec.momentum);
  const T wd = p.FromDouble(spec.weight_decay);
  const size_t batch = static_cast<size_t>(spec.batch_size);
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    rng.Shuffle(order);
    for (size_t start = 0; start < n; start += batch) {
      const size_t bs = std::min(batch, n - start);
      std::fill(gacc.begin(), gacc.end(), T{0});
      double loss = 0;
      for (size_t k = start; k < start + bs; ++k) {
        const size_t s = order[k];
        LoadInput(p, data.features[s], data.sample_size, input);
        const auto& logits = net.Forward(w.data(), input.data());
        loss += Softmax(p, logits, data.labels[s], probs);
        dlogits.resize(probs.size());
        for (size_t c = 0; c < probs.size(); ++c) {
          const double target = static_cast<int>(c) == data.labels[s] ? 1.0 : 0.0;
          dlogits[c] = p.FromDouble((probs[c] - target) / static_cast<double>(bs));
        }
        net.Backward(w.data(), input.data(), dlogits.data(), gacc.data());
      }
      HYFL_ENFORCE(std::isfinite(loss), RuntimeFailure,
                   "training diverged: non-finite loss");
      for (size_t j = 0; j < pc; ++j) {
        T g = p.Fin(gacc[j]);
        if (spec.weight_decay != 0.0) g += p.Fin(wd * w[j]);
        if (!vel.empty()) {
          vel[j] = p.Fin(mom * vel[j]) + g;
          g = vel[j];
        }
        w[j] -= p.Fin(lr * g);
      }
    }
  }
}

template <class P>
GradientResult GradientImpl(const Architecture& arch, const std::vector<typename P::T>& w,
                            const Examples& data, const P& p) {
  using T = typename P::T;
  Net<P> net(arch, p);
  std::vector<T> gacc(w.size()), input, dlogits;
  std::vector<double> probs;
  const double n = static_cast<double>(data.size());
  GradientResult result;
  for (size_t s = 0; s < data.size(); ++s) {
    LoadInput(p, data.features[s], data.sample_size, input);
    const auto& logits = net.Forward(w.data(), input.data());
    result.loss += Softmax(p, logits, data.labels[s], probs);
    dlogits.resize(probs.size());
    for (size_t c = 0; c < probs.size(); ++c) {
      const double target = static_cast<int>(c) == data.labels[s] ? 1.0 : 0.0;
      dlogits[c] = p.FromDouble((probs[c] - target) / n);
    }
    net.Backward(w.data(), input.data(), dlogits.data(), gacc.data());
  }
  result.loss /= n;
  result.gradient.resize(w.size());
  for (size_t j = 0; j < w.size(); ++j) result.gradient[j] = p.ToDouble(p.Fin(gacc[j]));
  return result;
}

template <class P>
void ForEachLogits(const Model& model, const std::vector<typename P::T>& w,
                   const Examples& data, const P& p,
                   const std::function<void(size_t, const std::vector<double>&)>& fn) {
  Net<P> net(model.arch(), p);
  std::vector<typename P::T> input;
  std::vector<double> scores;
  for (size_t s = 0; s < data.size(); ++s) {
    LoadInput(p, data.features[s], data.sample_size, input);
    const auto& logits = net.Forward(w.data(), input.data());
    scores.resize(logits.size());
    for (size_t c = 0; c < logits.size(); ++c) scores[c] = p.ToDouble(logits[c]);
    fn(s, scores);
  }
}

void ForEachScores(const Model& model, const Examples& data,
                   const std::function<void(size_t, const std::vector<double>&)>& fn) {
  CheckData(model, data);
  if (model.backend() == NumericBackend::kFixed) {
    ForEachLogits(model, model.fixed_params().raw(), data,
                  FixedPolicy{model.fixed_params().frac_bits()}, fn);
  } else {
    ForEachLogits(model, model.float_params(), data, FloatPolicy{}, fn);
  }
}

}  // namespace

Model Train(const Model& model, const Examples& data, const TrainSpec& spec) {
  HYFL_ENFORCE(spec.epochs >= 1, ShapeError, "epochs must be >= 1");
  HYFL_ENFORCE(spec.batch_size >= 1, ShapeError, "batch size must be >= 1");
  HYFL_ENFORCE(data.size() > 0, ShapeError, "training on an empty dataset");
  CheckData(model, data);
  Model out = model;
  if (out.backend() == NumericBackend::kFixed) {
    auto& params = out.mutable_fixed_params();
    TrainImpl(out.arch(), params.raw(), data, spec, FixedPolicy{params.frac_bits()});
  } else {
    TrainImpl(out.arch(), out.mutable_float_params(), data, spec, FloatPolicy{});
  }
  return out;
}

std::vector<double> Predict(const Model& model, const float* features) {
  Examples one;
  one.sample_size = model.arch().input_shape().size();
  one.Add(features, 0);
  std::vector<double> out;
  ForEachScores(model, one, [&](size_t, const std::vector<double>& s) { out = s; });
  return out;
}

std::vector<int> PredictLabels(const Model& model, const Examples& data) {
  std::vector<int> labels(data.size());
  ForEachScores(model, data, [&](size_t i, const std::vector<double>& s) {
    labels[i] = static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
  });
  return labels;
}

double Accuracy(const Model& model, const Examples& data) {
  if (data.size() == 0) return 0.0;
  const std::vector<int> predicted = PredictLabels(model, data);
  size_t correct = 0;
  for (size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == data.labels[i];
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

GradientResult Gradient(const Model& model, const Examples& data) {
  HYFL_ENFORCE(data.size() > 0, ShapeError, "gradient of an empty batch");
  CheckData(model, data);
  if (model.backend() == NumericBackend::kFixed) {
    return GradientImpl(model.arch(), model.fixed_params().raw(), data,
                        FixedPolicy{model.fixed_params().frac_bits()});
  }
  return GradientImpl(model.arch(), model.float_params(), data, FloatPolicy{});
}

double MeanLoss(const Model& model, const Examples& data) {
  HYFL_ENFORCE(data.size() > 0, ShapeError, "loss of an empty batch");
  double total = 0;
  std::vector<double> probs;
  ForEachScores(model, data, [&](size_t i, const std::vector<double>& s) {
    total += Softmax(FloatPolicy{}, s, data.labels[i], probs);
  });
  return total / static_cast<double>(data.size());
}

}  // namespace hyfl::nn
