// include/vqtts/nn/tensor.h

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

#ifndef VQTTS_NN_TENSOR_H_
#define VQTTS_NN_TENSOR_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace vqtts::nn {

// A node of the reverse-mode tape. Every tensor is a 2-D row-major matrix;
// sequence models use [positions x width], convolutional stacks use
// [channels x time].
struct Node {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> value;
  std::vector<double> grad;  // empty until something flows into it
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node &)> backward;

  std::size_t size() const noexcept { return rows * cols; }
  // Returns the gradient buffer, allocating zeros on first use.
  std::vector<double> &GradBuffer();
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Tensor Constant(std::size_t rows, std::size_t cols,
                         std::vector<double> values);
  static Tensor Zeros(std::size_t rows, std::size_t cols);
  // A leaf that accumulates gradients (model parameters).
  static Tensor Parameter(std::size_t rows, std::size_t cols,
                          std::vector<double> values);

  bool defined() const noexcept { return node_ != nullptr; }
  std::size_t rows() const { return node_->rows; }
  std::size_t cols() const { return node_->cols; }
  std::size_t size() const { return node_->size(); }
  bool requires_grad() const { return node_->requires_grad; }

  std::span<const double> value() const { return node_->value; }
  std::span<double> mutable_value() { return node_->value; }
  double at(std::size_t r, std::size_t c) const {
    return node_->value[r * node_->cols + c];
  }
  double item() const { return node_->value.at(0); }

  // Gradient after Backward(); zeros when nothing reached this tensor.
  std::vector<double> grad() const;
  void ZeroGrad();

  Node &node() const { return *node_; }
  const std::shared_ptr<Node> &shared() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Runs reverse accumulation from a 1x1 tensor.
void Backward(const Tensor &loss);

// While alive, new ops record no tape (inference). Thread-local.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard &) = delete;
  NoGradGuard &operator=(const NoGradGuard &) = delete;

 private:
  bool previous_;
};

bool GradEnabled();

}  // namespace vqtts::nn

#endif  // VQTTS_NN_TENSOR_H_
