// src/nn/ops.cc

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

#include "vqtts/nn/ops.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "vqtts/base/error.h"
#include "vqtts/dsp/fft.h"
#include "vqtts/simd/kernels.h"

namespace vqtts::nn {
namespace {

using BackwardFn = std::function<void(Node &)>;

void Require(bool ok, const char *what) {
  if (!ok) Fail(ErrorCode::kShapeMismatch, what);
}

// Builds the output node. The tape is recorded only when grad mode is on and
// at least one input wants a gradient.
Tensor MakeResult(std::size_t rows, std::size_t cols, std::vector<double> value,
                  std::vector<Tensor> inputs, BackwardFn backward) {
  auto node = std::make_shared<Node>();
  node->rows = rows;
  node->cols = cols;
  node->value = std::move(value);
  bool needs = false;
  if (GradEnabled()) {
    for (const Tensor &in : inputs) needs = needs || in.requires_grad();
  }
  if (needs) {
    node->requires_grad = true;
    for (Tensor &in : inputs) node->parents.push_back(in.shared());
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

// Gradient buffer of parent i, or nullptr when it takes no gradient.
double *ParentGrad(Node &self, std::size_t i) {
  Node &p = *self.parents[i];
  return p.requires_grad ? p.GradBuffer().data() : nullptr;
}

const std::vector<double> &ParentValue(Node &self, std::size_t i) {
  return self.parents[i]->value;
}

template <typename F, typename G>
Tensor Unary(const Tensor &a, F f, G dfdx) {
  std::vector<double> out(a.size());
  const auto in = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return MakeResult(a.rows(), a.cols(), std::move(out), {a},
                    [dfdx](Node &self) {
                      double *ga = ParentGrad(self, 0);
                      if (ga == nullptr) return;
                      const auto &x = ParentValue(self, 0);
                      for (std::size_t i = 0; i < self.size(); ++i) {
                        ga[i] += self.grad[i] * dfdx(x[i], self.value[i]);
                      }
                    });
}

}  // namespace

Tensor MatMul(const Tensor &a, const Tensor &b) {
  Require(a.cols() == b.rows(), "MatMul inner dimensions differ");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(m * n, 0.0);
  simd::GemmNN(m, n, k, a.value().data(), b.value().data(), out.data());
  return MakeResult(m, n, std::move(out), {a, b}, [m, k, n](Node &self) {
    const auto &av = ParentValue(self, 0);
    const auto &bv = ParentValue(self, 1);
    if (double *ga = ParentGrad(self, 0)) {
      simd::GemmNT(m, k, n, self.grad.data(), bv.data(), ga);
    }
    if (double *gb = ParentGrad(self, 1)) {
      simd::GemmTN(k, n, m, av.data(), self.grad.data(), gb);
    }
  });
}

Tensor MatMulNT(const Tensor &a, const Tensor &b) {
  Require(a.cols() == b.cols(), "MatMulNT inner dimensions differ");
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  std::vector<double> out(m * n, 0.0);
  simd::GemmNT(m, n, k, a.value().data(), b.value().data(), out.data());
  return MakeResult(m, n, std::move(out), {a, b}, [m, k, n](Node &self) {
    const auto &av = ParentValue(self, 0);
    const auto &bv = ParentValue(self, 1);
    if (double *ga = ParentGrad(self, 0)) {
      simd::GemmNN(m, k, n, self.grad.data(), bv.data(), ga);
    }
    if (double *gb = ParentGrad(self, 1)) {
      simd::GemmTN(n, k, m, self.grad.data(), av.data(), gb);
    }
  });
}

Tensor Transpose(const Tensor &a) {
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> out(r * c);
  const auto in = a.value();
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = in[i * c + j];
  }
  return MakeResult(c, r, std::move(out), {a}, [r, c](Node &self) {
    double *ga = ParentGrad(self, 0);
    if (ga == nullptr) return;
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) ga[i * c + j] += self.grad[j * r + i];
    }
  });
}

Tensor Add(const Tensor &a, const Tensor &b) {
  Require(a.rows() == b.rows() && a.cols() == b.cols(), "Add shape mismatch");
  std::vector<double> out(a.value().begin(), a.value().end());
  const auto bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return MakeResult(a.rows(), a.cols(), std::move(out), {a, b}, [](Node &self) {
    for (std::size_t p = 0; p < 2; ++p) {
      if (double *g = ParentGrad(self, p)) {
        for (std::size_t i = 0; i < self.size(); ++i) g[i] += self.grad[i];
      }
    }
  });
}

Tensor Sub(const Tensor &a, const Tensor &b) {
  Require(a.rows() == b.rows() && a.cols() == b.cols(), "Sub shape mismatch");
  std::vector<double> out(a.value().begin(), a.value().end());
  const auto bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return MakeResult(a.rows(), a.cols(), std::move(out), {a, b}, [](Node &self) {
    if (double *g = ParentGrad(self, 0)) {
      for (std::size_t i = 0; i < self.size(); ++i) g[i] += self.grad[i];
    }
    if (double *g = ParentGrad(self, 1)) {
      for (std::size_t i = 0; i < self.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Tensor Mul(const Tensor &a, const Tensor &b) {
  Require(a.rows() == b.rows() && a.cols() == b.cols(), "Mul shape mismatch");
  std::vector<double> out(a.size());
  const auto av = a.value(), bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return MakeResult(a.rows(), a.cols(), std::move(out), {a, b}, [](Node &self) {
    const auto &av = ParentValue(self, 0);
    const auto &bv = ParentValue(self, 1);
    if (double *g = ParentGrad(self, 0)) {
      for (std::size_t i = 0; i < self.size(); ++i) g[i] += self.grad[i] * bv[i];
    }
    if (double *g = ParentGrad(self, 1)) {
      for (std::size_t i = 0; i < self.size(); ++i) g[i] += self.grad[i] * av[i];
    }
  });
}

Tensor Scale(const Tensor &a, double s) {
  return Unary(
      a, [s](double x) { return x * s; }, [s](double, double) { return s; });
}

Tensor AddScalar(const Tensor &a, double s) {
  return Unary(
      a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor AddRowVector(const Tensor &a, const Tensor &row) {
  Require(row.rows() == 1 && row.cols() == a.cols(), "AddRowVector shape");
  const std::size_t n = a.rows(), d = a.cols();
  std::vector<double> out(a.value().begin(), a.value().end());
  const auto rv = row.value();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] += rv[j];
  }
  return MakeResult(n, d, std::move(out), {a, row}, [n, d](Node &self) {
    if (double *g = ParentGrad(self, 0)) {
      for (std::size_t i = 0; i < self.size(); ++i) g[i] += self.grad[i];
    }
    if (double *g = ParentGrad(self, 1)) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) g[j] += self.grad[i * d + j];
      }
    }
  });
}

Tensor AddColVector(const Tensor &a, const Tensor &col) {
  Require(col.cols() == 1 && col.rows() == a.rows(), "AddColVector shape");
  const std::size_t c = a.rows(), l = a.cols();
  std::vector<double> out(a.value().begin(), a.value().end());
  const auto cv = col.value();
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < l; ++j) out[i * l + j] += cv[i];
  }
  return MakeResult(c, l, std::move(out), {a, col}, [c, l](Node &self) {
    if (double *g = ParentGrad(self, 0)) {
      for (std::size_t i = 0; i < self.size(); ++i) g[i] += self.grad[i];
    }
    if (double *g = ParentGrad(self, 1)) {
      for (std::size_t i = 0; i < c; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < l; ++j) s += self.grad[i * l + j];
        g[i] += s;
      }
    }
  });
}

Tensor Relu(const Tensor &a) {
  return Unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor LeakyRelu(const Tensor &a, double slope) {
  return Unary(
      a, [slope](double x) { return x > 0.0 ? x : slope * x; },
      [slope](double x, double) { return x > 0.0 ? 1.0 : slope; });
}

Tensor Tanh(const Tensor &a) {
  return Unary(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor Sigmoid(const Tensor &a) {
  return Unary(
      a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor Gelu(const Tensor &a) {
  constexpr double kC = 0.7978845608028654;  // sqrt(2/pi)
  constexpr double kA = 0.044715;
  return Unary(
      a,
      [](double x) {
        return 0.5 * x * (1.0 + std::tanh(kC * (x + kA * x * x * x)));
      },
      [](double x, double) {
        const double u = kC * (x + kA * x * x * x);
        const double t = std::tanh(u);
        const double du = kC * (1.0 + 3.0 * kA * x * x);
        return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
      });
}

Tensor Exp(const Tensor &a) {
  return Unary(
      a, [](double x) { return std::exp(x); },
      [](double, double y) { return y; });
}

Tensor LogClamped(const Tensor &a, double floor) {
  return Unary(
      a, [floor](double x) { return std::log(std::max(x, floor)); },
      [floor](double x, double) { return x > floor ? 1.0 / x : 0.0; });
}

Tensor Abs(const Tensor &a) {
  return Unary(
      a, [](double x) { return std::abs(x); },
      [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Tensor Square(const Tensor &a) {
  return Unary(
      a, [](double x) { return x * x; },
      [](double x, double) { return 2.0 * x; });
}

Tensor SoftmaxRows(const Tensor &a) {
  const std::size_t n = a.rows(), d = a.cols();
  std::vector<double> out(a.size());
  const auto in = a.value();
  for (std::size_t i = 0; i < n; ++i) {
    const double *x = in.data() + i * d;
    double *y = out.data() + i * d;
    const double mx = *std::max_element(x, x + d);
    double z = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      y[j] = std::exp(x[j] - mx);
      z += y[j];
    }
    for (std::size_t j = 0; j < d; ++j) y[j] /= z;
  }
  return MakeResult(n, d, std::move(out), {a}, [n, d](Node &self) {
    double *ga = ParentGrad(self, 0);
    if (ga == nullptr) return;
    for (std::size_t i = 0; i < n; ++i) {
      const double *y = self.value.data() + i * d;
      const double *gy = self.grad.data() + i * d;
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += y[j] * gy[j];
      for (std::size_t j = 0; j < d; ++j) ga[i * d + j] += y[j] * (gy[j] - dot);
    }
  });
}

Tensor LayerNormRows(const Tensor &x, const Tensor &gain, const Tensor &bias,
                     double eps) {
  const std::size_t n = x.rows(), d = x.cols();
  Require(gain.size() == d && bias.size() == d, "LayerNorm parameter shape");
  std::vector<double> out(x.size());
  // Normalized activations and per-row inverse std for the backward pass.
  auto xhat = std::make_shared<std::vector<double>>(x.size());
  auto inv_std = std::make_shared<std::vector<double>>(n);
  const auto xv = x.value(), gv = gain.value(), bv = bias.value();
  for (std::size_t i = 0; i < n; ++i) {
    const double *row = xv.data() + i * d;
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += row[j];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (row[j] - mean) * (row[j] - mean);
    var /= static_cast<double>(d);
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[i] = is;
    for (std::size_t j = 0; j < d; ++j) {
      const double h = (row[j] - mean) * is;
      (*xhat)[i * d + j] = h;
      out[i * d + j] = h * gv[j] + bv[j];
    }
  }
  return MakeResult(
      n, d, std::move(out), {x, gain, bias},
      [n, d, xhat, inv_std](Node &self) {
        const auto &gv = ParentValue(self, 1);
        double *gx = ParentGrad(self, 0);
        double *gg = ParentGrad(self, 1);
        double *gb = ParentGrad(self, 2);
        std::vector<double> dh(d);
        for (std::size_t i = 0; i < n; ++i) {
          const double *gy = self.grad.data() + i * d;
          const double *h = xhat->data() + i * d;
          double sum_dh = 0.0, sum_dh_h = 0.0;
          for (std::size_t j = 0; j < d; ++j) {
            if (gg != nullptr) gg[j] += gy[j] * h[j];
            if (gb != nullptr) gb[j] += gy[j];
            dh[j] = gy[j] * gv[j];
            sum_dh += dh[j];
            sum_dh_h += dh[j] * h[j];
          }
          if (gx == nullptr) continue;
          const double inv_d = 1.0 / static_cast<double>(d);
          for (std::size_t j = 0; j < d; ++j) {
            gx[i * d + j] += (*inv_std)[i] *
                             (dh[j] - inv_d * sum_dh - h[j] * inv_d * sum_dh_h);
          }
        }
      });
}

Tensor Embedding(const Tensor &table, const std::vector<int> &ids) {
  const std::size_t d = table.cols();
  std::vector<double> out(ids.size() * d);
  const auto tv = table.value();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= table.rows()) {
      Fail(ErrorCode::kIndexOutOfRange,
           "embedding id " + std::to_string(ids[i]) + " outside table of " +
               std::to_string(table.rows()));
    }
    std::copy_n(tv.data() + ids[i] * d, d, out.data() + i * d);
  }
  return MakeResult(ids.size(), d, std::move(out), {table},
                    [ids, d](Node &self) {
                      double *g = ParentGrad(self, 0);
                      if (g == nullptr) return;
                      for (std::size_t i = 0; i < ids.size(); ++i) {
                        for (std::size_t j = 0; j < d; ++j) {
                          g[ids[i] * d + j] += self.grad[i * d + j];
                        }
                      }
                    });
}

Tensor ConcatCols(const std::vector<Tensor> &parts) {
  Require(!parts.empty(), "ConcatCols of nothing");
  const std::size_t n = parts[0].rows();
  std::vector<std::size_t> offsets;
  std::size_t total = 0;
  for (const Tensor &p : parts) {
    Require(p.rows() == n, "ConcatCols row mismatch");
    offsets.push_back(total);
    total += p.cols();
  }
  std::vector<double> out(n * total);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto v = parts[k].value();
    const std::size_t c = parts[k].cols();
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(v.data() + i * c, c, out.data() + i * total + offsets[k]);
    }
  }
  return MakeResult(n, total, std::move(out), parts,
                    [n, total, offsets](Node &self) {
                      for (std::size_t k = 0; k < self.parents.size(); ++k) {
                        double *g = ParentGrad(self, k);
                        if (g == nullptr) continue;
                        const std::size_t c = self.parents[k]->cols;
                        for (std::size_t i = 0; i < n; ++i) {
                          for (std::size_t j = 0; j < c; ++j) {
                            g[i * c + j] += self.grad[i * total + offsets[k] + j];
                          }
                        }
                      }
                    });
}

Tensor ConcatRows(const std::vector<Tensor> &parts) {
  Require(!parts.empty(), "ConcatRows of nothing");
  const std::size_t d = parts[0].cols();
  std::vector<double> out;
  std::size_t rows = 0;
  for (const Tensor &p : parts) {
    Require(p.cols() == d, "ConcatRows column mismatch");
    out.insert(out.end(), p.value().begin(), p.value().end());
    rows += p.rows();
  }
  return MakeResult(rows, d, std::move(out), parts, [](Node &self) {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < self.parents.size(); ++k) {
      const std::size_t sz = self.parents[k]->size();
      if (double *g = ParentGrad(self, k)) {
        for (std::size_t i = 0; i < sz; ++i) g[i] += self.grad[offset + i];
      }
      offset += sz;
    }
  });
}

Tensor SliceRows(const Tensor &a, std::size_t start, std::size_t count) {
  Require(start + count <= a.rows(), "SliceRows out of range");
  const std::size_t d = a.cols();
  std::vector<double> out(a.value().begin() + start * d,
                          a.value().begin() + (start + count) * d);
  return MakeResult(count, d, std::move(out), {a}, [start, d](Node &self) {
    double *g = ParentGrad(self, 0);
    if (g == nullptr) return;
    for (std::size_t i = 0; i < self.size(); ++i) g[start * d + i] += self.grad[i];
  });
}

Tensor SliceCols(const Tensor &a, std::size_t start, std::size_t count) {
  Require(start + count <= a.cols(), "SliceCols out of range");
  const std::size_t n = a.rows(), c = a.cols();
  std::vector<double> out(n * count);
  const auto v = a.value();
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(v.data() + i * c + start, count, out.data() + i * count);
  }
  return MakeResult(n, count, std::move(out), {a},
                    [n, c, start, count](Node &self) {
                      double *g = ParentGrad(self, 0);
                      if (g == nullptr) return;
                      for (std::size_t i = 0; i < n; ++i) {
                        for (std::size_t j = 0; j < count; ++j) {
                          g[i * c + start + j] += self.grad[i * count + j];
                        }
                      }
                    });
}

Tensor Reshape(const Tensor &a, std::size_t rows, std::size_t cols) {
  Require(rows * cols == a.size(), "Reshape size mismatch");
  std::vector<double> out(a.value().begin(), a.value().end());
  return MakeResult(rows, cols, std::move(out), {a}, [](Node &self) {
    double *g = ParentGrad(self, 0);
    if (g == nullptr) return;
    for (std::size_t i = 0; i < self.size(); ++i) g[i] += self.grad[i];
  });
}

Tensor RepeatRows(const Tensor &a, const std::vector<int> &counts) {
  Require(counts.size() == a.rows(), "RepeatRows needs one count per row");
  const std::size_t d = a.cols();
  std::size_t total = 0;
  for (int c : counts) {
    if (c < 0) Fail(ErrorCode::kInvalidArgument, "negative repeat count");
    total += static_cast<std::size_t>(c);
  }
  std::vector<double> out(total * d);
  const auto v = a.value();
  std::size_t r = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (int k = 0; k < counts[i]; ++k, ++r) {
      std::copy_n(v.data() + i * d, d, out.data() + r * d);
    }
  }
  return MakeResult(total, d, std::move(out), {a}, [counts, d](Node &self) {
    double *g = ParentGrad(self, 0);
    if (g == nullptr) return;
    std::size_t r = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      for (int k = 0; k < counts[i]; ++k, ++r) {
        for (std::size_t j = 0; j < d; ++j) g[i * d + j] += self.grad[r * d + j];
      }
    }
  });
}

Tensor Detach(const Tensor &a) {
  return Tensor::Constant(a.rows(), a.cols(),
                          std::vector<double>(a.value().begin(), a.value().end()));
}

Conv1dSpec Conv1dSpec::Same(std::size_t kernel, std::size_t dilation) {
  Conv1dSpec s;
  s.kernel = kernel;
  s.dilation = dilation;
  const std::size_t span = dilation * (kernel - 1);
  s.pad_left = span / 2;
  s.pad_right = span - span / 2;
  return s;
}

std::size_t Conv1dOutputLength(std::size_t len, const Conv1dSpec &spec) {
  const std::size_t padded = len + spec.pad_left + spec.pad_right;
  const std::size_t span = spec.dilation * (spec.kernel - 1) + 1;
  if (padded < span) return 0;
  return (padded - span) / spec.stride + 1;
}

Tensor Conv1d(const Tensor &x, const Tensor &weight, const Tensor &bias,
              const Conv1dSpec &spec) {
  const std::size_t cin = x.rows(), len = x.cols();
  const std::size_t cout = weight.rows(), k = spec.kernel;
  Require(weight.cols() == cin * k, "Conv1d weight must be [cout, cin*kernel]");
  const std::size_t lout = Conv1dOutputLength(len, spec);
  Require(lout > 0, "Conv1d input shorter than receptive field");
  if (bias.defined()) Require(bias.rows() == cout && bias.cols() == 1, "Conv1d bias");

  // im2col: cols[(c*k + i), t] = x[c, t*stride + i*dilation - pad_left].
  const std::size_t ck = cin * k;
  auto cols = std::make_shared<std::vector<double>>(ck * lout, 0.0);
  const auto xv = x.value();
  for (std::size_t c = 0; c < cin; ++c) {
    for (std::size_t i = 0; i < k; ++i) {
      double *dst = cols->data() + (c * k + i) * lout;
      const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(i * spec.dilation) -
                                   static_cast<std::ptrdiff_t>(spec.pad_left);
      for (std::size_t t = 0; t < lout; ++t) {
        const std::ptrdiff_t src =
            static_cast<std::ptrdiff_t>(t * spec.stride) + shift;
        if (src >= 0 && src < static_cast<std::ptrdiff_t>(len)) {
          dst[t] = xv[c * len + static_cast<std::size_t>(src)];
        }
      }
    }
  }
  std::vector<double> out(cout * lout, 0.0);
  simd::GemmNN(cout, lout, ck, weight.value().data(), cols->data(), out.data());
  if (bias.defined()) {
    const auto bv = bias.value();
    for (std::size_t o = 0; o < cout; ++o) {
      for (std::size_t t = 0; t < lout; ++t) out[o * lout + t] += bv[o];
    }
  }
  std::vector<Tensor> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);
  const bool has_bias = bias.defined();
  return MakeResult(
      cout, lout, std::move(out), std::move(inputs),
      [cin, len, cout, k, lout, ck, spec, cols, has_bias](Node &self) {
        const auto &wv = ParentValue(self, 1);
        if (double *gw = ParentGrad(self, 1)) {
          simd::GemmNT(cout, ck, lout, self.grad.data(), cols->data(), gw);
        }
        if (has_bias) {
          if (double *gb = ParentGrad(self, 2)) {
            for (std::size_t o = 0; o < cout; ++o) {
              double s = 0.0;
              for (std::size_t t = 0; t < lout; ++t) s += self.grad[o * lout + t];
              gb[o] += s;
            }
          }
        }
        double *gx = ParentGrad(self, 0);
        if (gx == nullptr) return;
        std::vector<double> dcols(ck * lout, 0.0);
        simd::GemmTN(ck, lout, cout, wv.data(), self.grad.data(), dcols.data());
        for (std::size_t c = 0; c < cin; ++c) {
          for (std::size_t i = 0; i < k; ++i) {
            const double *src = dcols.data() + (c * k + i) * lout;
            const std::ptrdiff_t shift =
                static_cast<std::ptrdiff_t>(i * spec.dilation) -
                static_cast<std::ptrdiff_t>(spec.pad_left);
            for (std::size_t t = 0; t < lout; ++t) {
              const std::ptrdiff_t dst =
                  static_cast<std::ptrdiff_t>(t * spec.stride) + shift;
              if (dst >= 0 && dst < static_cast<std::ptrdiff_t>(len)) {
                gx[c * len + static_cast<std::size_t>(dst)] += src[t];
              }
            }
          }
        }
      });
}

Tensor UpsampleNearest(const Tensor &x, std::size_t factor) {
  const std::size_t c = x.rows(), l = x.cols();
  std::vector<double> out(c * l * factor);
  const auto v = x.value();
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t t = 0; t < l; ++t) {
      std::fill_n(out.data() + i * l * factor + t * factor, factor, v[i * l + t]);
    }
  }
  return MakeResult(c, l * factor, std::move(out), {x},
                    [c, l, factor](Node &self) {
                      double *g = ParentGrad(self, 0);
                      if (g == nullptr) return;
                      for (std::size_t i = 0; i < c; ++i) {
                        for (std::size_t t = 0; t < l; ++t) {
                          double s = 0.0;
                          const double *src =
                              self.grad.data() + i * l * factor + t * factor;
                          for (std::size_t f = 0; f < factor; ++f) s += src[f];
                          g[i * l + t] += s;
                        }
                      }
                    });
}

Tensor AvgPool1d(const Tensor &x, std::size_t kernel, std::size_t stride,
                 std::size_t pad) {
  const std::size_t c = x.rows(), l = x.cols();
  Require(l + 2 * pad >= kernel, "AvgPool1d input too short");
  const std::size_t lout = (l + 2 * pad - kernel) / stride + 1;
  std::vector<double> out(c * lout, 0.0);
  const auto v = x.value();
  const double inv = 1.0 / static_cast<double>(kernel);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t t = 0; t < lout; ++t) {
      double s = 0.0;
      for (std::size_t q = 0; q < kernel; ++q) {
        const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t * stride + q) -
                                   static_cast<std::ptrdiff_t>(pad);
        if (src >= 0 && src < static_cast<std::ptrdiff_t>(l)) s += v[i * l + src];
      }
      out[i * lout + t] = s * inv;
    }
  }
  return MakeResult(c, lout, std::move(out), {x},
                    [c, l, lout, kernel, stride, pad, inv](Node &self) {
                      double *g = ParentGrad(self, 0);
                      if (g == nullptr) return;
                      for (std::size_t i = 0; i < c; ++i) {
                        for (std::size_t t = 0; t < lout; ++t) {
                          const double gv = self.grad[i * lout + t] * inv;
                          for (std::size_t q = 0; q < kernel; ++q) {
                            const std::ptrdiff_t src =
                                static_cast<std::ptrdiff_t>(t * stride + q) -
                                static_cast<std::ptrdiff_t>(pad);
                            if (src >= 0 && src < static_cast<std::ptrdiff_t>(l)) {
                              g[i * l + src] += gv;
                            }
                          }
                        }
                      }
                    });
}

Tensor Sum(const Tensor &a) {
  double s = 0.0;
  for (double v : a.value()) s += v;
  return MakeResult(1, 1, {s}, {a}, [](Node &self) {
    double *g = ParentGrad(self, 0);
    if (g == nullptr) return;
    const std::size_t n = self.parents[0]->size();
    for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[0];
  });
}

Tensor Mean(const Tensor &a) {
  Require(a.size() > 0, "Mean of empty tensor");
  return Scale(Sum(a), 1.0 / static_cast<double>(a.size()));
}

Tensor CrossEntropySum(const Tensor &logits, const std::vector<int> &targets,
                       const std::vector<double> &weights) {
  const std::size_t n = logits.rows(), v = logits.cols();
  Require(targets.size() == n && weights.size() == n,
          "CrossEntropySum needs one target and weight per row");
  auto probs = std::make_shared<std::vector<double>>(n * v);
  const auto lv = logits.value();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double *x = lv.data() + i * v;
    double *p = probs->data() + i * v;
    const double mx = *std::max_element(x, x + v);
    double z = 0.0;
    for (std::size_t j = 0; j < v; ++j) {
      p[j] = std::exp(x[j] - mx);
      z += p[j];
    }
    for (std::size_t j = 0; j < v; ++j) p[j] /= z;
    if (weights[i] <= 0.0) continue;
    if (targets[i] < 0 || static_cast<std::size_t>(targets[i]) >= v) {
      Fail(ErrorCode::kIndexOutOfRange, "cross-entropy target out of range");
    }
    total += weights[i] * (std::log(z) + mx - x[targets[i]]);
  }
  return MakeResult(1, 1, {total}, {logits},
                    [n, v, probs, targets, weights](Node &self) {
                      double *g = ParentGrad(self, 0);
                      if (g == nullptr) return;
                      const double up = self.grad[0];
                      for (std::size_t i = 0; i < n; ++i) {
                        if (weights[i] <= 0.0) continue;
                        const double w = up * weights[i];
                        for (std::size_t j = 0; j < v; ++j) {
                          g[i * v + j] += w * (*probs)[i * v + j];
                        }
                        g[i * v + targets[i]] -= w;
                      }
                    });
}

Tensor WeightedL1Sum(const Tensor &pred, const std::vector<double> &target,
                     const std::vector<double> &weights) {
  Require(target.size() == pred.size() && weights.size() == pred.size(),
          "WeightedL1Sum shape");
  double total = 0.0;
  const auto pv = pred.value();
  for (std::size_t i = 0; i < pv.size(); ++i) {
    if (weights[i] != 0.0) total += weights[i] * std::abs(pv[i] - target[i]);
  }
  return MakeResult(1, 1, {total}, {pred}, [target, weights](Node &self) {
    double *g = ParentGrad(self, 0);
    if (g == nullptr) return;
    const auto &pv = ParentValue(self, 0);
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const double d = pv[i] - target[i];
      const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
      g[i] += self.grad[0] * weights[i] * s;
    }
  });
}

Tensor WeightedSquaredSum(const Tensor &pred, const std::vector<double> &target,
                          const std::vector<double> &weights) {
  Require(target.size() == pred.size() && weights.size() == pred.size(),
          "WeightedSquaredSum shape");
  double total = 0.0;
  const auto pv = pred.value();
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double d = pv[i] - target[i];
    if (weights[i] != 0.0) total += weights[i] * d * d;
  }
  return MakeResult(1, 1, {total}, {pred}, [target, weights](Node &self) {
    double *g = ParentGrad(self, 0);
    if (g == nullptr) return;
    const auto &pv = ParentValue(self, 0);
    for (std::size_t i = 0; i < pv.size(); ++i) {
      g[i] += self.grad[0] * weights[i] * 2.0 * (pv[i] - target[i]);
    }
  });
}

Tensor StftMagnitude(const Tensor &wave, std::size_t n_fft, std::size_t hop,
                     std::size_t win) {
  Require(wave.rows() == 1, "StftMagnitude expects a [1, n] signal");
  Require(win <= n_fft && hop > 0, "StftMagnitude window/hop");
  const std::size_t n = wave.cols();
  const std::size_t frames = n / hop;
  Require(frames > 0, "StftMagnitude signal shorter than one hop");
  const std::size_t bins = n_fft / 2 + 1;
  const std::size_t offset = (n_fft - win) / 2;
  constexpr double kEps = 1e-9;

  auto window = dsp::HannWindow(win);
  auto spectrum = std::make_shared<std::vector<std::complex<double>>>(frames * bins);
  std::vector<double> out(frames * bins);
  dsp::RealFft fft(n_fft);
  std::vector<double> buf(n_fft);
  const auto wv = wave.value();
  for (std::size_t t = 0; t < frames; ++t) {
    std::fill(buf.begin(), buf.end(), 0.0);
    const std::ptrdiff_t start = dsp::FrameStart(t, hop, win);
    for (std::size_t i = 0; i < win; ++i) {
      const std::ptrdiff_t src = start + static_cast<std::ptrdiff_t>(i);
      if (src >= 0 && src < static_cast<std::ptrdiff_t>(n)) {
        buf[offset + i] = wv[src] * window[i];
      }
    }
    std::complex<double> *spec = spectrum->data() + t * bins;
    fft.Forward(buf.data(), spec);
    for (std::size_t k = 0; k < bins; ++k) {
      out[t * bins + k] = std::sqrt(std::norm(spec[k]) + kEps);
    }
  }
  auto window_shared = std::shared_ptr<double[]>(std::move(window));
  return MakeResult(
      frames, bins, std::move(out), {wave},
      [n, frames, bins, n_fft, hop, win, offset, spectrum,
       window_shared](Node &self) {
        double *g = ParentGrad(self, 0);
        if (g == nullptr) return;
        // d|X_k|/dx_n = Re(conj-weighted inverse transform); see RealFft::Inverse.
        dsp::RealFft fft(n_fft);
        std::vector<std::complex<double>> c(bins);
        std::vector<double> dbuf(n_fft);
        for (std::size_t t = 0; t < frames; ++t) {
          for (std::size_t k = 0; k < bins; ++k) {
            const std::complex<double> x = (*spectrum)[t * bins + k];
            const double scale = self.grad[t * bins + k] / self.value[t * bins + k];
            // X_k = sum x e^{-i theta}: dRe/dx = cos, dIm/dx = -sin, so
            // dL/dx_n = Re(sum_k (gRe + i gIm) e^{+i theta}).
            std::complex<double> ck(scale * x.real(), scale * x.imag());
            const bool edge = (k == 0) || (2 * k == n_fft);
            c[k] = edge ? ck : 0.5 * ck;
          }
          fft.Inverse(c.data(), dbuf.data());
          const std::ptrdiff_t start = dsp::FrameStart(t, hop, win);
          for (std::size_t i = 0; i < win; ++i) {
            const std::ptrdiff_t src = start + static_cast<std::ptrdiff_t>(i);
            if (src >= 0 && src < static_cast<std::ptrdiff_t>(n)) {
              g[src] += dbuf[offset + i] * window_shared[i];
            }
          }
        }
      });
}

}  // namespace vqtts::nn
