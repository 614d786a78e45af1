// include/vqtts/features/options.h

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

#ifndef VQTTS_FEATURES_OPTIONS_H_
#define VQTTS_FEATURES_OPTIONS_H_

#include <cstddef>

#include "vqtts/base/config.h"
#include "vqtts/dsp/mel.h"

namespace vqtts::features {

struct FeatureOptions {
  int sample_rate = 16000;
  std::size_t hop = 160;  // 10 ms
  std::size_t win = 400;  // 25 ms
  std::size_t n_fft = 512;
  std::size_t n_mels = 40;
  double f0_min = 60.0;
  double f0_max = 400.0;
  double voicing_threshold = 0.5;
  double energy_floor = -11.5;
  std::size_t spk_dim = 192;  // surrogate embedding: spk_dim / 2 mel bands, mean + std

  // Reads keys without a section prefix: sample_rate, hop, win, n_fft,
  // n_mels, f0_min, f0_max, voicing_threshold, spk_dim.
  static FeatureOptions FromConfig(const Config &c);
  void ToConfig(Config &c) const;

  dsp::MelOptions Mel() const;
  double frame_hop_s() const { return static_cast<double>(hop) / sample_rate; }
};

}  // namespace vqtts::features

#endif  // VQTTS_FEATURES_OPTIONS_H_
