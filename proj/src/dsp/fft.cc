// src/dsp/fft.cc

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

#include "vqtts/dsp/fft.h"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

namespace vqtts::dsp {
namespace {
std::mutex &PlannerMutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft::Impl {
  double *real = nullptr;
  fftw_complex *spec = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

RealFft::RealFft(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  impl_->real = fftw_alloc_real(n);
  impl_->spec = fftw_alloc_complex(n / 2 + 1);
  const int ni = static_cast<int>(n);
  impl_->forward =
      fftw_plan_dft_r2c_1d(ni, impl_->real, impl_->spec, FFTW_ESTIMATE);
  impl_->inverse =
      fftw_plan_dft_c2r_1d(ni, impl_->spec, impl_->real, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(impl_->forward);
  fftw_destroy_plan(impl_->inverse);
  fftw_free(impl_->real);
  fftw_free(impl_->spec);
}

void RealFft::Forward(const double *in, std::complex<double> *out) {
  std::memcpy(impl_->real, in, n_ * sizeof(double));
  fftw_execute(impl_->forward);
  for (std::size_t k = 0; k < bins(); ++k) {
    out[k] = {impl_->spec[k][0], impl_->spec[k][1]};
  }
}

void RealFft::Inverse(const std::complex<double> *in, double *out) {
  for (std::size_t k = 0; k < bins(); ++k) {
    impl_->spec[k][0] = in[k].real();
    impl_->spec[k][1] = in[k].imag();
  }
  // c2r destroys its input; the spectrum buffer is scratch here.
  fftw_execute(impl_->inverse);
  std::memcpy(out, impl_->real, n_ * sizeof(double));
}

std::unique_ptr<double[]> HannWindow(std::size_t n) {
  auto w = std::make_unique<double[]>(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

}  // namespace vqtts::dsp
