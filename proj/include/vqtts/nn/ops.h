// include/vqtts/nn/ops.h

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

#ifndef VQTTS_NN_OPS_H_
#define VQTTS_NN_OPS_H_

#include <cstddef>
#include <vector>

#include "vqtts/nn/tensor.h"

namespace vqtts::nn {

// Linear algebra.
Tensor MatMul(const Tensor &a, const Tensor &b);    // a[m,k] b[k,n]
Tensor MatMulNT(const Tensor &a, const Tensor &b);  // a[m,k] b[n,k]^T
Tensor Transpose(const Tensor &a);

// Elementwise, identical shapes.
Tensor Add(const Tensor &a, const Tensor &b);
Tensor Sub(const Tensor &a, const Tensor &b);
Tensor Mul(const Tensor &a, const Tensor &b);
Tensor Scale(const Tensor &a, double s);
Tensor AddScalar(const Tensor &a, double s);

// Broadcasts: row vector [1,d] over [n,d]; column vector [c,1] over [c,l].
Tensor AddRowVector(const Tensor &a, const Tensor &row);
Tensor AddColVector(const Tensor &a, const Tensor &col);

Tensor Relu(const Tensor &a);
Tensor LeakyRelu(const Tensor &a, double slope);
Tensor Tanh(const Tensor &a);
Tensor Sigmoid(const Tensor &a);
Tensor Gelu(const Tensor &a);  // tanh approximation
Tensor Exp(const Tensor &a);
// log(max(a, floor)); gradient is zero where the floor is active.
Tensor LogClamped(const Tensor &a, double floor);
Tensor Abs(const Tensor &a);
Tensor Square(const Tensor &a);

Tensor SoftmaxRows(const Tensor &a);
Tensor LayerNormRows(const Tensor &x, const Tensor &gain, const Tensor &bias,
                     double eps = 1e-5);

// Rows of `table` gathered by `ids`.
Tensor Embedding(const Tensor &table, const std::vector<int> &ids);

Tensor ConcatCols(const std::vector<Tensor> &parts);
Tensor ConcatRows(const std::vector<Tensor> &parts);
Tensor SliceRows(const Tensor &a, std::size_t start, std::size_t count);
Tensor SliceCols(const Tensor &a, std::size_t start, std::size_t count);
Tensor Reshape(const Tensor &a, std::size_t rows, std::size_t cols);
// Row r of `a` repeated counts[r] times, in order.
Tensor RepeatRows(const Tensor &a, const std::vector<int> &counts);
// Same value, no gradient path.
Tensor Detach(const Tensor &a);

struct Conv1dSpec {
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t dilation = 1;
  std::size_t pad_left = 0;
  std::size_t pad_right = 0;

  static Conv1dSpec Same(std::size_t kernel, std::size_t dilation = 1);
};
// x[cin, len], weight[cout, cin*kernel], bias[cout, 1] (may be undefined).
Tensor Conv1d(const Tensor &x, const Tensor &weight, const Tensor &bias,
              const Conv1dSpec &spec);
std::size_t Conv1dOutputLength(std::size_t len, const Conv1dSpec &spec);

// [c, l] -> [c, l * factor], each column repeated.
Tensor UpsampleNearest(const Tensor &x, std::size_t factor);
// Average pooling along columns with zero padding counted in the average.
Tensor AvgPool1d(const Tensor &x, std::size_t kernel, std::size_t stride,
                 std::size_t pad);

Tensor Sum(const Tensor &a);
Tensor Mean(const Tensor &a);

// Sum over rows with weight[r] > 0 of weight[r] * -log softmax(logits[r])[t_r].
Tensor CrossEntropySum(const Tensor &logits, const std::vector<int> &targets,
                       const std::vector<double> &weights);
// Sum of weight * |pred - target| elementwise; target is constant.
Tensor WeightedL1Sum(const Tensor &pred, const std::vector<double> &target,
                     const std::vector<double> &weights);
Tensor WeightedSquaredSum(const Tensor &pred, const std::vector<double> &target,
                          const std::vector<double> &weights);

// Magnitude STFT of a [1, n] signal with a periodic Hann window, centred
// frames, reflect-free zero padding. Output [frames, n_fft/2 + 1].
Tensor StftMagnitude(const Tensor &wave, std::size_t n_fft, std::size_t hop,
                     std::size_t win);

}  // namespace vqtts::nn

#endif  // VQTTS_NN_OPS_H_
