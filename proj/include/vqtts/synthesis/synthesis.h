// include/vqtts/synthesis/synthesis.h

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

#ifndef VQTTS_SYNTHESIS_SYNTHESIS_H_
#define VQTTS_SYNTHESIS_SYNTHESIS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vqtts/base/matrix.h"
#include "vqtts/corpus/corpus.h"
#include "vqtts/features/speaker.h"
#include "vqtts/frontend/sil_predictor.h"
#include "vqtts/frontend/tokens.h"
#include "vqtts/txt2vec/acoustic_model.h"
#include "vqtts/vec2wav/vocoder.h"

namespace vqtts::synthesis {

using ProfileMap = std::map<std::string, features::SpeakerProfile>;

/// Moves voiced log-pitch from the source speaker's statistics to the
/// target's: z-score under src, then rescale by tgt. When src std is below
/// 1e-6 only the mean is shifted. Unvoiced frames (pitch 0), energy and pov
/// are copied. Throws MissingStats.
MatrixD PitchRescale(const MatrixD &aux, const features::SpeakerProfile &src,
                     const features::SpeakerProfile &tgt);

/// Native speaker of `language_id` whose logf0_mean is nearest the target's;
/// ties go to the smallest id. A given override is validated and returned.
/// Throws NoNativeSpeaker, UnknownSpeaker, InvalidArgument (override not
/// native), InconsistentRegistry (native speaker without a profile).
std::string ChooseNativeSpeaker(const std::string &language_id,
                                const features::SpeakerProfile &target,
                                const corpus::SpeakerRegistry &registry,
                                const ProfileMap &profiles,
                                const std::optional<std::string> &override_id = std::nullopt);

enum class SynthesisMode { kMono, kCross };

struct SynthesisRequest {
  std::string text;
  std::string target_speaker_id;
  std::string language_id;
  std::optional<std::string> native_override;
};

struct SynthesisTrace {
  SynthesisMode mode = SynthesisMode::kMono;
  std::string am_speaker_id;
  std::string voc_speaker_id;
  bool pitch_rescaled = false;
  std::vector<int> durations;
  std::size_t frames = 0;        // T
  std::size_t audio_length = 0;  // samples, T * hop
  std::vector<std::string> tokens;
};

struct SynthesisResult {
  std::vector<double> waveform;
  SynthesisTrace trace;
};

// Stage interfaces, so orchestration can be tested with spies.
class TextFrontend {
 public:
  virtual ~TextFrontend() = default;
  virtual frontend::TokenSequence Process(const std::string &text,
                                          const std::string &language_id) const = 0;
};

class AcousticBackend {
 public:
  virtual ~AcousticBackend() = default;
  virtual txt2vec::AcousticInference Infer(const frontend::TokenSequence &tokens,
                                           const std::vector<double> &spk,
                                           const std::string &language_id) const = 0;
};

class VocoderBackend {
 public:
  virtual ~VocoderBackend() = default;
  virtual std::vector<double> Generate(const MatrixI &vq, const MatrixD &aux,
                                       const std::vector<double> &spk) const = 0;
  virtual std::size_t hop() const = 0;
};

/// normalize -> tokenize -> silence prediction at word boundaries.
class SilFrontend : public TextFrontend {
 public:
  explicit SilFrontend(const frontend::SilPredictor &predictor, double threshold = 0.5)
      : predictor_(predictor), threshold_(threshold) {}
  frontend::TokenSequence Process(const std::string &text,
                                  const std::string &language_id) const override;

 private:
  const frontend::SilPredictor &predictor_;
  double threshold_;
};

class ModelAcousticBackend : public AcousticBackend {
 public:
  explicit ModelAcousticBackend(const txt2vec::AcousticModel &model) : model_(model) {}
  txt2vec::AcousticInference Infer(const frontend::TokenSequence &tokens,
                                   const std::vector<double> &spk,
                                   const std::string &language_id) const override {
    return model_.Infer(tokens, spk, language_id);
  }

 private:
  const txt2vec::AcousticModel &model_;
};

class ModelVocoderBackend : public VocoderBackend {
 public:
  explicit ModelVocoderBackend(const vec2wav::Vocoder &voc) : voc_(voc) {}
  std::vector<double> Generate(const MatrixI &vq, const MatrixD &aux,
                               const std::vector<double> &spk) const override {
    return voc_.Generate(vq, aux, spk);
  }
  std::size_t hop() const override { return voc_.config().hop; }

 private:
  const vec2wav::Vocoder &voc_;
};

/// Cross mode iff the target speaker's native language differs from the
/// requested one. Throws UnknownSpeaker, UnknownLanguage.
SynthesisMode ModeOf(const SynthesisRequest &request, const corpus::SpeakerRegistry &registry);

/// Mono: both models get the target embedding. Cross: the acoustic model
/// gets a native speaker's embedding, pitch is rescaled native -> target and
/// the vocoder gets the target embedding.
SynthesisResult Synthesize(const SynthesisRequest &request, const TextFrontend &frontend,
                           const AcousticBackend &am, const VocoderBackend &voc,
                           const ProfileMap &profiles, const corpus::SpeakerRegistry &registry);

/// Two-line TSV: header, then values (durations comma-separated).
std::string FormatTrace(const SynthesisTrace &trace);
void WriteTrace(const std::filesystem::path &path, const SynthesisTrace &trace);

}  // namespace vqtts::synthesis

#endif  // VQTTS_SYNTHESIS_SYNTHESIS_H_
