// include/vqtts/corpus/audio.h

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

#ifndef VQTTS_CORPUS_AUDIO_H_
#define VQTTS_CORPUS_AUDIO_H_

#include <filesystem>
#include <vector>

namespace vqtts::corpus {

/// Mono waveform with samples in [-1, 1].
struct Waveform {
  int sample_rate = 0;
  std::vector<double> samples;

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

// Only mono 16-bit PCM RIFF/WAVE is accepted; anything else is
// UnsupportedAudio rather than a silent conversion.
Waveform ReadWav(const std::filesystem::path &path);
void WriteWav(const std::filesystem::path &path, const Waveform &wave);

}  // namespace vqtts::corpus

#endif  // VQTTS_CORPUS_AUDIO_H_
