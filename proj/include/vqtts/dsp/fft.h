// include/vqtts/dsp/fft.h

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

#ifndef VQTTS_DSP_FFT_H_
#define VQTTS_DSP_FFT_H_

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>

namespace vqtts::dsp {

// Real-input FFT of fixed size backed by FFTW. Plans are created once per
// size (plan creation is serialized); Forward/Inverse are safe to call
// concurrently on distinct objects.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t bins() const noexcept { return n_ / 2 + 1; }

  // out[k] = sum_n in[n] exp(-2 pi i k n / N), k = 0..N/2.
  void Forward(const double *in, std::complex<double> *out);
  // out[n] = sum_{k=0}^{N-1} X[k] exp(+2 pi i k n / N) for the Hermitian
  // extension of `in` (unnormalized). Imaginary parts of bins 0 and N/2 are
  // ignored.
  void Inverse(const std::complex<double> *in, double *out);

 private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

// Frame t of a signal covers [FrameStart(t), FrameStart(t) + win): the window
// is centred on the middle of hop t. Samples outside the signal read as zero.
// A signal of n samples has n / hop frames.
inline std::ptrdiff_t FrameStart(std::size_t t, std::size_t hop,
                                 std::size_t win) {
  return static_cast<std::ptrdiff_t>(t * hop + hop / 2) -
         static_cast<std::ptrdiff_t>(win / 2);
}

// Periodic Hann window of length n.
std::unique_ptr<double[]> HannWindow(std::size_t n);

}  // namespace vqtts::dsp

#endif  // VQTTS_DSP_FFT_H_
