// tests/toy_am.h

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

#ifndef VQTTS_TESTS_TOY_AM_H_
#define VQTTS_TESTS_TOY_AM_H_

#include <cmath>
#include <random>
#include <vector>

#include "vqtts/txt2vec/acoustic_model.h"

namespace vqtts::testing {

// A width-16 acoustic model small enough for finite differences.
inline txt2vec::AcousticModelConfig ToyAmConfig(std::size_t width = 16) {
  txt2vec::AcousticModelConfig c;
  c.alphabet = {U'a', U'b', U'c', U'd'};
  c.languages = {"hi", "te"};
  c.spk_dim = 8;
  c.width = width;
  c.heads = 2;
  c.enc_blocks = 1;
  c.dec_blocks = 1;
  c.dec_width = width;
  c.ffn_width = 2 * width;
  c.dur_width = width;
  c.groups = 2;
  c.codebook_size = 8;
  c.aux_stats = {std::log(150.0), 0.3, -4.0, 2.0};
  c.seed = 7;
  return c;
}

// Random items whose targets are consistent with the shapes of `c`.
inline std::vector<txt2vec::AcousticItem> ToyAmItems(const txt2vec::AcousticModelConfig &c,
                                                     std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto uniform = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<txt2vec::AcousticItem> items;
  const int n_ids = static_cast<int>(c.alphabet.size()) + 2;
  for (std::size_t i = 0; i < n; ++i) {
    txt2vec::AcousticItem it;
    const int s = uniform(3, 6);
    int frames = 0;
    for (int k = 0; k < s; ++k) {
      const int id = uniform(0, n_ids - 1);
      it.token_ids.push_back(id);
      const int d = uniform(id == txt2vec::kSilId ? 0 : 1, 3);
      it.durations.push_back(d);
      frames += d;
    }
    if (frames == 0) {
      it.durations[0] = 1;
      frames = 1;
    }
    it.token_mask.assign(s, true);
    it.language = uniform(0, static_cast<int>(c.languages.size()) - 1);
    for (std::size_t k = 0; k < c.spk_dim; ++k) it.spk.push_back(gauss(rng));
    it.vq = MatrixI(frames, c.groups);
    for (int &v : it.vq.data()) v = uniform(0, static_cast<int>(c.codebook_size) - 1);
    it.aux = MatrixD(frames, 3);
    for (int f = 0; f < frames; ++f) {
      const bool voiced = uniform(0, 9) < 7;
      it.aux(f, 0) = voiced ? 80.0 + uniform(0, 220) : 0.0;
      it.aux(f, 1) = -4.0 + 2.0 * gauss(rng);
      it.aux(f, 2) = voiced ? 0.9 : 0.1;
    }
    it.frame_mask.assign(frames, true);
    items.push_back(std::move(it));
  }
  return items;
}

}  // namespace vqtts::testing

#endif  // VQTTS_TESTS_TOY_AM_H_
