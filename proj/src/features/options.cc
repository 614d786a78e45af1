// src/features/options.cc

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

#include "vqtts/features/options.h"

#include <string>

#include "vqtts/base/error.h"

namespace vqtts::features {

FeatureOptions FeatureOptions::FromConfig(const Config &c) {
  FeatureOptions o;
  o.sample_rate = static_cast<int>(c.GetInt("sample_rate", o.sample_rate));
  o.hop = c.GetInt("hop", o.hop);
  o.win = c.GetInt("win", o.win);
  o.n_fft = c.GetInt("n_fft", o.n_fft);
  o.n_mels = c.GetInt("n_mels", o.n_mels);
  o.f0_min = c.GetDouble("f0_min", o.f0_min);
  o.f0_max = c.GetDouble("f0_max", o.f0_max);
  o.voicing_threshold = c.GetDouble("voicing_threshold", o.voicing_threshold);
  o.spk_dim = c.GetInt("spk_dim", o.spk_dim);
  if (o.sample_rate <= 0 || o.hop == 0 || o.win == 0 || o.win > o.n_fft || o.n_mels == 0) {
    Fail(ErrorCode::kBadConfig, "feature framing options are inconsistent");
  }
  if (!(o.f0_min > 0 && o.f0_max > o.f0_min && o.f0_max < o.sample_rate / 2.0)) {
    Fail(ErrorCode::kBadConfig, "need 0 < f0_min < f0_max < sample_rate / 2");
  }
  if (o.spk_dim < 2 || o.spk_dim % 2 != 0) {
    Fail(ErrorCode::kBadConfig, "spk_dim must be even and >= 2");
  }
  return o;
}

void FeatureOptions::ToConfig(Config &c) const {
  c.Set("sample_rate", std::to_string(sample_rate));
  c.Set("hop", std::to_string(hop));
  c.Set("win", std::to_string(win));
  c.Set("n_fft", std::to_string(n_fft));
  c.Set("n_mels", std::to_string(n_mels));
  c.Set("f0_min", std::to_string(f0_min));
  c.Set("f0_max", std::to_string(f0_max));
  c.Set("voicing_threshold", std::to_string(voicing_threshold));
  c.Set("spk_dim", std::to_string(spk_dim));
}

dsp::MelOptions FeatureOptions::Mel() const {
  dsp::MelOptions m;
  m.sample_rate = sample_rate;
  m.hop = hop;
  m.win = win;
  m.n_fft = n_fft;
  m.n_mels = n_mels;
  return m;
}

}  // namespace vqtts::features
