// src/nn/layers.cc

// Copyright 2026  The vqtts Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "vqtts/nn/layers.h"

#include <cmath>

#include "vqtts/base/error.h"

namespace vqtts::nn {

Tensor ParamStore::Register(const std::string &name, std::size_t rows,
                            std::size_t cols, std::vector<double> values) {
  for (const auto &[existing, t] : params_) {
    if (existing == name) {
      Fail(ErrorCode::kInvalidArgument, "duplicate parameter name " + name);
    }
  }
  Tensor t = Tensor::Parameter(rows, cols, std::move(values));
  params_.emplace_back(name, t);
  return t;
}

Tensor ParamStore::Uniform(const std::string &name, std::size_t rows,
                           std::size_t cols, double bound) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> v(rows * cols);
  for (double &x : v) x = dist(rng_);
  return Register(name, rows, cols, std::move(v));
}

Tensor ParamStore::Normal(const std::string &name, std::size_t rows,
                          std::size_t cols, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  std::vector<double> v(rows * cols);
  for (double &x : v) x = dist(rng_);
  return Register(name, rows, cols, std::move(v));
}

Tensor ParamStore::Fill(const std::string &name, std::size_t rows,
                        std::size_t cols, double value) {
  return Register(name, rows, cols, std::vector<double>(rows * cols, value));
}

Tensor ParamStore::Find(const std::string &name) const {
  for (const auto &[n, t] : params_) {
    if (n == name) return t;
  }
  Fail(ErrorCode::kInvalidArgument, "no parameter named " + name);
}

std::size_t ParamStore::NumScalars() const {
  std::size_t n = 0;
  for (const auto &[name, t] : params_) n += t.size();
  return n;
}

void ParamStore::ZeroGrad() {
  for (auto &[name, t] : params_) t.ZeroGrad();
}

Linear::Linear(ParamStore &store, const std::string &name, std::size_t in,
               std::size_t out, bool bias, double gain) {
  const double bound = gain * std::sqrt(6.0 / static_cast<double>(in + out));
  weight_ = store.Uniform(name + ".weight", in, out, bound);
  if (bias) bias_ = store.Fill(name + ".bias", 1, out, 0.0);
}

Tensor Linear::operator()(const Tensor &x) const {
  Tensor y = MatMul(x, weight_);
  return bias_.defined() ? AddRowVector(y, bias_) : y;
}

LayerNorm::LayerNorm(ParamStore &store, const std::string &name,
                     std::size_t width)
    : gain_(store.Fill(name + ".gain", 1, width, 1.0)),
      bias_(store.Fill(name + ".bias", 1, width, 0.0)) {}

Tensor LayerNorm::operator()(const Tensor &x) const {
  return LayerNormRows(x, gain_, bias_);
}

Conv1dLayer::Conv1dLayer(ParamStore &store, const std::string &name,
                         std::size_t cin, std::size_t cout, Conv1dSpec spec,
                         bool bias)
    : spec_(spec) {
  const double fan_in = static_cast<double>(cin * spec.kernel);
  weight_ = store.Uniform(name + ".weight", cout, cin * spec.kernel,
                          1.0 / std::sqrt(fan_in));
  if (bias) bias_ = store.Fill(name + ".bias", cout, 1, 0.0);
}

Tensor Conv1dLayer::operator()(const Tensor &x) const {
  return Conv1d(x, weight_, bias_, spec_);
}

MultiHeadSelfAttention::MultiHeadSelfAttention(ParamStore &store,
                                               const std::string &name,
                                               std::size_t width,
                                               std::size_t heads)
    : q_(store, name + ".q", width, width),
      k_(store, name + ".k", width, width),
      v_(store, name + ".v", width, width),
      out_(store, name + ".out", width, width),
      width_(width),
      heads_(heads) {
  if (heads == 0 || width % heads != 0) {
    Fail(ErrorCode::kBadConfig, "attention width must divide into heads");
  }
}

Tensor MultiHeadSelfAttention::operator()(const Tensor &x) const {
  const Tensor q = q_(x), k = k_(x), v = v_(x);
  const std::size_t dh = width_ / heads_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Tensor> per_head;
  per_head.reserve(heads_);
  for (std::size_t h = 0; h < heads_; ++h) {
    const Tensor qh = SliceCols(q, h * dh, dh);
    const Tensor kh = SliceCols(k, h * dh, dh);
    const Tensor vh = SliceCols(v, h * dh, dh);
    const Tensor attn = SoftmaxRows(Scale(MatMulNT(qh, kh), scale));
    per_head.push_back(MatMul(attn, vh));
  }
  const Tensor merged = heads_ == 1 ? per_head[0] : ConcatCols(per_head);
  return out_(merged);
}

TransformerBlock::TransformerBlock(ParamStore &store, const std::string &name,
                                   std::size_t width, std::size_t heads,
                                   std::size_t ffn_width)
    : ln1_(store, name + ".ln1", width),
      ln2_(store, name + ".ln2", width),
      attn_(store, name + ".attn", width, heads),
      ff1_(store, name + ".ff1", width, ffn_width),
      ff2_(store, name + ".ff2", ffn_width, width) {}

Tensor TransformerBlock::operator()(const Tensor &x) const {
  const Tensor h = Add(x, attn_(ln1_(x)));
  return Add(h, ff2_(Gelu(ff1_(ln2_(h)))));
}

Tensor SinusoidalPositions(std::size_t n, std::size_t width) {
  std::vector<double> v(n * width);
  for (std::size_t pos = 0; pos < n; ++pos) {
    for (std::size_t i = 0; i < width; ++i) {
      const double rate =
          std::pow(10000.0, -static_cast<double>(2 * (i / 2)) /
                                static_cast<double>(width));
      const double angle = static_cast<double>(pos) * rate;
      v[pos * width + i] = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return Tensor::Constant(n, width, std::move(v));
}

}  // namespace vqtts::nn
