// src/simd/kernels_scalar.cc

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

#include "vqtts/simd/kernels.h"

namespace vqtts::simd {
namespace {

double DotScalar(const double *a, const double *b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void AxpyScalar(double alpha, const double *x, double *y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void GemmNNScalar(std::size_t m, std::size_t n, std::size_t k,
                  const double *a, const double *b, double *c) {
  for (std::size_t i = 0; i < m; ++i) {
    double *ci = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      const double *bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

void GemmNTScalar(std::size_t m, std::size_t n, std::size_t k,
                  const double *a, const double *b, double *c) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c[i * n + j] += DotScalar(a + i * k, b + j * k, k);
    }
  }
}

void GemmTNScalar(std::size_t m, std::size_t n, std::size_t k,
                  const double *a, const double *b, double *c) {
  for (std::size_t p = 0; p < k; ++p) {
    const double *ap = a + p * m;
    const double *bp = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double api = ap[i];
      if (api == 0.0) continue;
      double *ci = c + i * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += api * bp[j];
    }
  }
}

}  // namespace

const KernelTable &ScalarKernels() {
  static const KernelTable table{"scalar",     DotScalar,    AxpyScalar,
                                 GemmNNScalar, GemmNTScalar, GemmTNScalar};
  return table;
}

}  // namespace vqtts::simd
