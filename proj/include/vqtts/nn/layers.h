// include/vqtts/nn/layers.h

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

#ifndef VQTTS_NN_LAYERS_H_
#define VQTTS_NN_LAYERS_H_

#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "vqtts/nn/ops.h"
#include "vqtts/nn/tensor.h"

namespace vqtts::nn {

// Named, ordered collection of trainable tensors. Layers register into it at
// construction so checkpoints and optimizers see one flat list.
class ParamStore {
 public:
  explicit ParamStore(std::uint64_t seed = 0) : rng_(seed) {}

  Tensor Uniform(const std::string &name, std::size_t rows, std::size_t cols,
                 double bound);
  Tensor Normal(const std::string &name, std::size_t rows, std::size_t cols,
                double stddev);
  Tensor Fill(const std::string &name, std::size_t rows, std::size_t cols,
              double value);

  const std::vector<std::pair<std::string, Tensor>> &params() const {
    return params_;
  }
  Tensor Find(const std::string &name) const;
  std::size_t NumScalars() const;
  void ZeroGrad();

 private:
  Tensor Register(const std::string &name, std::size_t rows, std::size_t cols,
                  std::vector<double> values);

  std::mt19937_64 rng_;
  std::vector<std::pair<std::string, Tensor>> params_;
};

// Xavier-uniform weights scaled by `gain`; zero bias.
class Linear {
 public:
  Linear() = default;
  Linear(ParamStore &store, const std::string &name, std::size_t in,
         std::size_t out, bool bias = true, double gain = 1.0);
  Tensor operator()(const Tensor &x) const;  // [n, in] -> [n, out]
  const Tensor &weight() const { return weight_; }

 private:
  Tensor weight_;
  Tensor bias_;
};

class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(ParamStore &store, const std::string &name, std::size_t width);
  Tensor operator()(const Tensor &x) const;

 private:
  Tensor gain_;
  Tensor bias_;
};

// Convolution over [channels, time].
class Conv1dLayer {
 public:
  Conv1dLayer() = default;
  Conv1dLayer(ParamStore &store, const std::string &name, std::size_t cin,
              std::size_t cout, Conv1dSpec spec, bool bias = true);
  Tensor operator()(const Tensor &x) const;
  const Conv1dSpec &spec() const { return spec_; }

 private:
  Tensor weight_;
  Tensor bias_;
  Conv1dSpec spec_;
};

class MultiHeadSelfAttention {
 public:
  MultiHeadSelfAttention() = default;
  MultiHeadSelfAttention(ParamStore &store, const std::string &name,
                         std::size_t width, std::size_t heads);
  Tensor operator()(const Tensor &x) const;  // [n, width]

 private:
  Linear q_, k_, v_, out_;
  std::size_t width_ = 0;
  std::size_t heads_ = 1;
};

// Pre-norm block: x + Attn(LN(x)), then x + FFN(LN(x)) with a GELU FFN.
class TransformerBlock {
 public:
  TransformerBlock() = default;
  TransformerBlock(ParamStore &store, const std::string &name,
                   std::size_t width, std::size_t heads, std::size_t ffn_width);
  Tensor operator()(const Tensor &x) const;

 private:
  LayerNorm ln1_, ln2_;
  MultiHeadSelfAttention attn_;
  Linear ff1_, ff2_;
};

// Fixed sinusoidal position table [n, width].
Tensor SinusoidalPositions(std::size_t n, std::size_t width);

}  // namespace vqtts::nn

#endif  // VQTTS_NN_LAYERS_H_
