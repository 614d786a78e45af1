// tests/toy_voc.h

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

#ifndef VQTTS_TESTS_TOY_VOC_H_
#define VQTTS_TESTS_TOY_VOC_H_

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "vqtts/vec2wav/vocoder.h"

namespace vqtts::testing {

inline vec2wav::VocoderConfig ToyVocConfig() {
  vec2wav::VocoderConfig c;
  c.groups = 2;
  c.codebook_size = 8;
  c.code_dim = 8;
  c.aux_dim = 4;
  c.enc_width = 16;
  c.enc_blocks = 1;
  c.gen_channels = 16;
  c.upsample_rates = {5, 4, 2};
  c.hop = 40;
  c.spk_dim = 4;
  c.segment_frames = 16;
  c.loss_n_fft = 128;
  c.loss_win = 100;
  c.loss_hop = 20;
  c.loss_n_mels = 20;
  c.periods = {2, 3};
  c.scales = 2;
  c.disc_channels = 4;
  c.aux_stats = {std::log(200.0), 0.4, -3.0, 1.0};
  c.seed = 3;
  return c;
}

// Frames carry a code that picks a tone; the reference is that tone.
inline std::vector<vec2wav::VocoderItem> ToyVocItems(const vec2wav::VocoderConfig &c,
                                                     std::size_t n, std::uint64_t seed,
                                                     std::size_t frames = 24) {
  std::mt19937_64 rng(seed);
  std::vector<vec2wav::VocoderItem> items;
  for (std::size_t i = 0; i < n; ++i) {
    vec2wav::VocoderItem it;
    it.vq = MatrixI(frames, c.groups);
    it.aux = MatrixD(frames, 3);
    std::normal_distribution<double> g(0.0, 1.0);
    for (std::size_t k = 0; k < c.spk_dim; ++k) it.spk.push_back(g(rng));
    double phase = 0.0;
    int code = 0;
    for (std::size_t f = 0; f < frames; ++f) {
      if (f % 4 == 0) code = std::uniform_int_distribution<int>(0, static_cast<int>(c.codebook_size) - 1)(rng);
      const double hz = 150.0 + 50.0 * code;
      for (std::size_t gi = 0; gi < c.groups; ++gi) it.vq(f, gi) = (code + static_cast<int>(gi)) % static_cast<int>(c.codebook_size);
      it.aux(f, 0) = hz;
      it.aux(f, 1) = -3.0;
      it.aux(f, 2) = 0.9;
      for (std::size_t s = 0; s < c.hop; ++s) {
        phase += 2.0 * std::numbers::pi * hz / c.sample_rate;
        it.wave.push_back(0.3 * std::sin(phase));
      }
    }
    items.push_back(std::move(it));
  }
  return items;
}

}  // namespace vqtts::testing

#endif  // VQTTS_TESTS_TOY_VOC_H_
