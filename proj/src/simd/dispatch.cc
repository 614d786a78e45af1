// src/simd/dispatch.cc

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

#include <cstdlib>
#include <cstring>

#include "vqtts/simd/kernels.h"

namespace vqtts::simd {

#if defined(VQTTS_HAVE_AVX2)
const KernelTable &Avx2KernelTable();
#endif

const KernelTable *Avx2Kernels() {
#if defined(VQTTS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &Avx2KernelTable() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable &Kernels() {
  static const KernelTable *active = [] {
    const char *forced = std::getenv("VQTTS_SIMD");
    if (forced != nullptr && std::strcmp(forced, "scalar") == 0) {
      return &ScalarKernels();
    }
    const KernelTable *wide = Avx2Kernels();
    return wide != nullptr ? wide : &ScalarKernels();
  }();
  return *active;
}

}  // namespace vqtts::simd
