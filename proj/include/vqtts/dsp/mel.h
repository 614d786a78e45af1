// include/vqtts/dsp/mel.h

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

#ifndef VQTTS_DSP_MEL_H_
#define VQTTS_DSP_MEL_H_

#include <cstddef>
#include <vector>

#include "vqtts/base/matrix.h"

namespace vqtts::dsp {

struct MelOptions {
  int sample_rate = 16000;
  std::size_t hop = 160;
  std::size_t win = 400;
  std::size_t n_fft = 512;
  std::size_t n_mels = 40;
  double f_min = 20.0;
  double f_max = 0.0;       // <= 0 means Nyquist
  double log_floor = 1e-5;  // log(max(energy, floor))
};

/// Triangular HTK-style mel filterbank, [n_fft/2+1 x n_mels].
MatrixD MelFilterbank(const MelOptions &opts);

/// Log mel magnitude spectrogram, [T x n_mels] with T = samples / hop.
/// Magnitudes are Hann-windowed STFT magnitudes on the shared framing grid.
MatrixD LogMel(const std::vector<double> &samples, const MelOptions &opts);

}  // namespace vqtts::dsp

#endif  // VQTTS_DSP_MEL_H_
