// src/nn/tensor.cc

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

#include "vqtts/nn/tensor.h"

#include <algorithm>
#include <unordered_set>

#include "vqtts/base/error.h"

namespace vqtts::nn {
namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

std::vector<double> &Node::GradBuffer() {
  if (grad.size() != size()) grad.assign(size(), 0.0);
  return grad;
}

Tensor Tensor::Constant(std::size_t rows, std::size_t cols,
                        std::vector<double> values) {
  if (values.size() != rows * cols) {
    Fail(ErrorCode::kShapeMismatch, "constant value count does not match shape");
  }
  auto node = std::make_shared<Node>();
  node->rows = rows;
  node->cols = cols;
  node->value = std::move(values);
  return Tensor(std::move(node));
}

Tensor Tensor::Zeros(std::size_t rows, std::size_t cols) {
  return Constant(rows, cols, std::vector<double>(rows * cols, 0.0));
}

Tensor Tensor::Parameter(std::size_t rows, std::size_t cols,
                         std::vector<double> values) {
  Tensor t = Constant(rows, cols, std::move(values));
  t.node().requires_grad = true;
  return t;
}

std::vector<double> Tensor::grad() const {
  if (node_->grad.size() == node_->size()) return node_->grad;
  return std::vector<double>(node_->size(), 0.0);
}

void Tensor::ZeroGrad() { node_->grad.assign(node_->size(), 0.0); }

void Backward(const Tensor &loss) {
  if (loss.size() != 1) {
    Fail(ErrorCode::kShapeMismatch, "Backward expects a scalar loss");
  }
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node *> order;
  std::unordered_set<Node *> visited;
  std::vector<std::pair<Node *, std::size_t>> stack;
  stack.emplace_back(&loss.node(), 0);
  visited.insert(&loss.node());
  while (!stack.empty()) {
    auto &[node, next] = stack.back();
    if (next < node->parents.size()) {
      Node *parent = node->parents[next++].get();
      if (parent->requires_grad && !visited.count(parent)) {
        visited.insert(parent);
        stack.emplace_back(parent, 0);
      }
      continue;
    }
    order.push_back(node);
    stack.pop_back();
  }

  loss.node().GradBuffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node *node = *it;
    if (node->backward && node->grad.size() == node->size()) {
      node->backward(*node);
    }
  }
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) {
  g_grad_enabled = false;
}
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

bool GradEnabled() { return g_grad_enabled; }

}  // namespace vqtts::nn
