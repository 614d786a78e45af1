// include/vqtts/features/speaker.h

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

#ifndef VQTTS_FEATURES_SPEAKER_H_
#define VQTTS_FEATURES_SPEAKER_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vqtts/base/matrix.h"
#include "vqtts/features/options.h"

namespace vqtts::features {

struct SpeakerProfile {
  std::string speaker_id;
  std::vector<double> embedding;  // unit norm
  double logf0_mean = 0.0;
  double logf0_std = 0.0;
  int n_voiced_frames = 0;
};

/// Built-in utterance embedding: per-band mean and standard deviation of
/// a spk_dim/2-band log-mel spectrogram, concatenated and unit-normalized.
std::vector<double> SurrogateSpeakerEmbedding(const std::vector<double> &samples,
                                              const FeatureOptions &opts);

/// Mean of the utterance embeddings re-normalized to unit length, plus
/// log-F0 statistics (population std) over all voiced frames of `aux`.
/// Throws DegenerateEmbedding or NoVoicedFrames.
SpeakerProfile BuildSpeakerProfile(const std::string &speaker_id,
                                   const std::vector<std::vector<double>> &embeddings,
                                   const std::vector<MatrixD> &aux);

/// profiles.tsv: speaker, logf0_mean, logf0_std, n_voiced, comma-separated
/// embedding; values written with round-trip precision.
void SaveProfiles(const std::filesystem::path &path,
                  const std::map<std::string, SpeakerProfile> &profiles);
std::map<std::string, SpeakerProfile> LoadProfiles(const std::filesystem::path &path);

}  // namespace vqtts::features

#endif  // VQTTS_FEATURES_SPEAKER_H_
