// include/vqtts/simd/kernels.h

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

#ifndef VQTTS_SIMD_KERNELS_H_
#define VQTTS_SIMD_KERNELS_H_

#include <cstddef>
#include <string_view>

namespace vqtts::simd {

// Dense inner loops used by the numeric engine and the DSP front end. Every
// kernel has a portable scalar reference; wider variants must agree with it
// up to floating-point reassociation.
//
// All matrices are row-major and contiguous. Gemm kernels accumulate into C.
struct KernelTable {
  std::string_view isa;
  double (*dot)(const double *a, const double *b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double *x, double *y, std::size_t n);
  // C[m x n] += A[m x k] * B[k x n]
  void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k,
                  const double *a, const double *b, double *c);
  // C[m x n] += A[m x k] * B[n x k]^T
  void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k,
                  const double *a, const double *b, double *c);
  // C[m x n] += A[k x m]^T * B[k x n]
  void (*gemm_tn)(std::size_t m, std::size_t n, std::size_t k,
                  const double *a, const double *b, double *c);
};

const KernelTable &ScalarKernels();

// nullptr when the binary was built without the AVX2 variant or the host CPU
// lacks AVX2+FMA.
const KernelTable *Avx2Kernels();

// The table used by the library. Picks the widest supported variant on first
// use; VQTTS_SIMD=scalar in the environment forces the reference path.
const KernelTable &Kernels();

inline double Dot(const double *a, const double *b, std::size_t n) {
  return Kernels().dot(a, b, n);
}
inline void Axpy(double alpha, const double *x, double *y, std::size_t n) {
  Kernels().axpy(alpha, x, y, n);
}
inline void GemmNN(std::size_t m, std::size_t n, std::size_t k,
                   const double *a, const double *b, double *c) {
  Kernels().gemm_nn(m, n, k, a, b, c);
}
inline void GemmNT(std::size_t m, std::size_t n, std::size_t k,
                   const double *a, const double *b, double *c) {
  Kernels().gemm_nt(m, n, k, a, b, c);
}
inline void GemmTN(std::size_t m, std::size_t n, std::size_t k,
                   const double *a, const double *b, double *c) {
  Kernels().gemm_tn(m, n, k, a, b, c);
}

}  // namespace vqtts::simd

#endif  // VQTTS_SIMD_KERNELS_H_
