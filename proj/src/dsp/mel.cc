// src/dsp/mel.cc

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

#include "vqtts/dsp/mel.h"

#include <algorithm>
#include <cmath>
#include <complex>

#include "vqtts/base/error.h"
#include "vqtts/dsp/fft.h"

namespace vqtts::dsp {
namespace {

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

MatrixD MelFilterbank(const MelOptions &opts) {
  if (opts.n_mels == 0 || opts.n_fft < 2 || opts.sample_rate <= 0) {
    Fail(ErrorCode::kBadConfig, "bad mel filterbank options");
  }
  const double f_max = opts.f_max > 0 ? opts.f_max : opts.sample_rate / 2.0;
  const std::size_t bins = opts.n_fft / 2 + 1;
  const double mel_lo = HzToMel(opts.f_min), mel_hi = HzToMel(f_max);
  std::vector<double> edges(opts.n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (opts.n_mels + 1));
  }
  MatrixD fb(bins, opts.n_mels);
  for (std::size_t k = 0; k < bins; ++k) {
    const double hz = static_cast<double>(k) * opts.sample_rate / opts.n_fft;
    for (std::size_t m = 0; m < opts.n_mels; ++m) {
      const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
      double w = 0.0;
      if (hz > lo && hz <= mid) w = (hz - lo) / (mid - lo);
      else if (hz > mid && hz < hi) w = (hi - hz) / (hi - mid);
      fb(k, m) = w;
    }
  }
  return fb;
}

MatrixD LogMel(const std::vector<double> &samples, const MelOptions &opts) {
  if (opts.win > opts.n_fft) Fail(ErrorCode::kBadConfig, "win > n_fft");
  const std::size_t frames = samples.size() / opts.hop;
  const MatrixD fb = MelFilterbank(opts);
  const auto window = HannWindow(opts.win);
  RealFft fft(opts.n_fft);
  std::vector<double> buf(opts.n_fft);
  std::vector<std::complex<double>> spec(fft.bins());
  std::vector<double> mag(fft.bins());
  MatrixD out(frames, opts.n_mels);
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
  for (std::size_t t = 0; t < frames; ++t) {
    std::fill(buf.begin(), buf.end(), 0.0);
    const std::ptrdiff_t start = FrameStart(t, opts.hop, opts.win);
    for (std::size_t i = 0; i < opts.win; ++i) {
      const std::ptrdiff_t s = start + static_cast<std::ptrdiff_t>(i);
      if (s >= 0 && s < n) buf[i] = samples[s] * window[i];
    }
    fft.Forward(buf.data(), spec.data());
    for (std::size_t k = 0; k < spec.size(); ++k) {
      mag[k] = std::sqrt(std::norm(spec[k]) + 1e-9);
    }
    for (std::size_t m = 0; m < opts.n_mels; ++m) {
      double e = 0.0;
      for (std::size_t k = 0; k < mag.size(); ++k) e += mag[k] * fb(k, m);
      out(t, m) = std::log(std::max(e, opts.log_floor));
    }
  }
  return out;
}

}  // namespace vqtts::dsp
