// src/features/aux.cc

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

#include "vqtts/features/aux.h"

#include <algorithm>
#include <cmath>

#include "vqtts/base/error.h"
#include "vqtts/dsp/fft.h"
#include "vqtts/simd/kernels.h"

namespace vqtts::features {

MatrixD ExtractAux(const std::vector<double> &samples, const FeatureOptions &opts) {
  if (samples.size() < opts.hop) {
    Fail(ErrorCode::kTooShort, std::to_string(samples.size()) + " samples < hop " +
                                   std::to_string(opts.hop));
  }
  const std::size_t T = samples.size() / opts.hop;
  const std::size_t W = opts.win;
  const auto lag_min =
      std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(opts.sample_rate / opts.f0_max)));
  const auto lag_max = static_cast<std::size_t>(std::ceil(opts.sample_rate / opts.f0_min));

  // Zero-padded copy so every analysis span is a plain pointer range.
  const std::size_t pad = W + lag_max + opts.hop;
  std::vector<double> x(samples.size() + 2 * pad, 0.0);
  std::copy(samples.begin(), samples.end(), x.begin() + pad);
  std::vector<double> sq(x.size() + 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) sq[i + 1] = sq[i] + x[i] * x[i];
  const auto energy = [&](std::size_t begin, std::size_t len) {
    return std::max(0.0, sq[begin + len] - sq[begin]);
  };

  MatrixD aux(T, 3, 0.0);
  std::vector<double> nccf(lag_max + 2, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    const std::ptrdiff_t start = dsp::FrameStart(t, opts.hop, W);
    const std::size_t b = static_cast<std::size_t>(start + static_cast<std::ptrdiff_t>(pad));
    const double e0 = energy(b, W);
    const double rms = std::sqrt(e0 / W);
    aux(t, kEnergy) = rms > 0 ? std::max(std::log(rms), opts.energy_floor) : opts.energy_floor;
    if (e0 <= 1e-12) continue;

    double best = 0.0;
    for (std::size_t lag = lag_min - 1; lag <= lag_max + 1; ++lag) {
      const double el = energy(b + lag, W);
      const double denom = std::sqrt(e0 * el);
      nccf[lag] = denom > 1e-12 ? simd::Dot(&x[b], &x[b + lag], W) / denom : 0.0;
    }
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
      if (nccf[lag] > nccf[lag - 1] && nccf[lag] >= nccf[lag + 1]) best = std::max(best, nccf[lag]);
    }
    if (best <= 0.0) continue;
    std::size_t pick = 0;
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
      const bool peak = nccf[lag] > nccf[lag - 1] && nccf[lag] >= nccf[lag + 1];
      if (peak && nccf[lag] >= 0.95 * best) {
        pick = lag;
        break;
      }
    }
    if (pick == 0) continue;
    double refined = static_cast<double>(pick);
    double peak = nccf[pick];
    {
      const double a = nccf[pick - 1], c = nccf[pick + 1];
      const double curv = a - 2 * nccf[pick] + c;
      if (curv < 0) {
        const double delta = std::clamp(0.5 * (a - c) / curv, -0.5, 0.5);
        refined += delta;
        peak = nccf[pick] - 0.25 * (a - c) * delta;
      }
    }
    const double pov = std::clamp(peak, 0.0, 1.0);
    aux(t, kPov) = pov;
    if (pov >= opts.voicing_threshold) aux(t, kPitchHz) = opts.sample_rate / refined;
  }
  return aux;
}

AuxStats ComputeAuxStats(const std::vector<MatrixD> &aux) {
  double f_sum = 0, e_sum = 0;
  std::size_t nf = 0, ne = 0;
  for (const MatrixD &a : aux) {
    if (a.cols() != 3) Fail(ErrorCode::kShapeMismatch, "aux must be [T x 3]");
    for (std::size_t t = 0; t < a.rows(); ++t) {
      if (a(t, 0) > 0) {
        f_sum += std::log(a(t, 0));
        ++nf;
      }
      e_sum += a(t, 1);
      ++ne;
    }
  }
  if (ne == 0) Fail(ErrorCode::kInsufficientData, "no aux frames");
  if (nf == 0) Fail(ErrorCode::kNoVoicedFrames, "no voiced frames in the training aux");
  AuxStats s;
  s.logf0_mean = f_sum / nf;
  s.energy_mean = e_sum / ne;
  double f_var = 0, e_var = 0;
  for (const MatrixD &a : aux) {
    for (std::size_t t = 0; t < a.rows(); ++t) {
      if (a(t, 0) > 0) f_var += std::pow(std::log(a(t, 0)) - s.logf0_mean, 2);
      e_var += std::pow(a(t, 1) - s.energy_mean, 2);
    }
  }
  s.logf0_std = std::max(std::sqrt(f_var / nf), 1e-3);
  s.energy_std = std::max(std::sqrt(e_var / ne), 1e-3);
  return s;
}

MatrixD NormalizeAux(const MatrixD &aux, const AuxStats &stats) {
  if (aux.cols() != 3) Fail(ErrorCode::kShapeMismatch, "aux must be [T x 3]");
  MatrixD out(aux.rows(), 3);
  for (std::size_t t = 0; t < aux.rows(); ++t) {
    out(t, 0) = aux(t, 0) > 0 ? (std::log(aux(t, 0)) - stats.logf0_mean) / stats.logf0_std : 0.0;
    out(t, 1) = (aux(t, 1) - stats.energy_mean) / stats.energy_std;
    out(t, 2) = aux(t, 2);
  }
  return out;
}

}  // namespace vqtts::features
