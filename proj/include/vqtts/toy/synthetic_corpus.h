// include/vqtts/toy/synthetic_corpus.h

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

#ifndef VQTTS_TOY_SYNTHETIC_CORPUS_H_
#define VQTTS_TOY_SYNTHETIC_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vqtts/base/config.h"
#include "vqtts/corpus/corpus.h"

namespace vqtts::toy {

struct SyntheticCorpusOptions {
  std::vector<std::string> languages = {"hi", "mr", "te"};
  int speakers_per_language = 2;
  int utts_per_speaker = 16;
  double min_duration_s = 2.0;
  double max_duration_s = 4.0;
  int sample_rate = 16000;
  int hop = 160;
  // Fraction of utterances whose hypothesis transcript gets character
  // substitutions; the rest are recognized perfectly.
  double corrupt_fraction = 0.25;
  std::uint64_t seed = 1;
};

/// Letters used for one of the built-in languages (hi, mr, te). The first
/// letter is the pause letter: a word ending in it is followed by a pause.
std::vector<std::string> SyntheticAlphabet(const std::string &language_id);

struct SyntheticCorpus {
  std::vector<corpus::Utterance> utts;
  std::map<std::string, std::string> hyps;  // utt_id -> hypothesis
  corpus::SpeakerRegistry registry;
  std::map<std::string, double> speaker_f0;  // base pitch in Hz
};

/// Writes `root/{manifest.tsv, hyp.tsv, speakers.tsv, wav/<utt>.wav}`.
///
/// Each character is a harmonic tone at the speaker's pitch (with a slow
/// per-word contour) shaped by two character-specific spectral peaks; each
/// speaker adds its own spectral tilt and level. A word ending in the pause
/// letter is followed by 20-30 frames of near silence. Audio lengths are whole
/// multiples of the hop.
SyntheticCorpus WriteSyntheticCorpus(const std::filesystem::path &root,
                                     const SyntheticCorpusOptions &opts);

/// Pipeline settings sized for the synthetic corpus: small models, G = 2,
/// V = 64, per-speaker budgets of 40 s and 30 s. Paths are relative to the
/// corpus root, so the config belongs next to manifest.tsv.
Config SyntheticPipelineConfig();

}  // namespace vqtts::toy

#endif  // VQTTS_TOY_SYNTHETIC_CORPUS_H_
