// src/synthesis/synthesis.cc

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

#include "vqtts/synthesis/synthesis.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "vqtts/base/error.h"
#include "vqtts/base/log.h"

namespace vqtts::synthesis {

namespace {

void RequireStats(const features::SpeakerProfile &p) {
  if (p.n_voiced_frames <= 0 || !std::isfinite(p.logf0_mean) || !std::isfinite(p.logf0_std) ||
      p.logf0_std < 0) {
    Fail(ErrorCode::kMissingStats, "speaker " + p.speaker_id + " has no log-F0 statistics");
  }
}

const features::SpeakerProfile &ProfileOf(const ProfileMap &profiles, const std::string &id) {
  auto it = profiles.find(id);
  if (it == profiles.end()) {
    Fail(ErrorCode::kInconsistentRegistry, "no speaker profile for " + id);
  }
  return it->second;
}

}  // namespace

MatrixD PitchRescale(const MatrixD &aux, const features::SpeakerProfile &src,
                     const features::SpeakerProfile &tgt) {
  RequireStats(src);
  RequireStats(tgt);
  if (aux.cols() != 3) Fail(ErrorCode::kShapeMismatch, "aux must be [T x 3]");
  const bool shift_only = src.logf0_std < 1e-6;
  MatrixD out = aux;
  for (std::size_t t = 0; t < aux.rows(); ++t) {
    const double p = aux(t, 0);
    if (!(p > 0)) continue;
    const double lp = std::log(p);
    const double moved = shift_only
                             ? lp - src.logf0_mean + tgt.logf0_mean
                             : (lp - src.logf0_mean) / src.logf0_std * tgt.logf0_std + tgt.logf0_mean;
    out(t, 0) = std::exp(moved);
  }
  return out;
}

std::string ChooseNativeSpeaker(const std::string &language_id,
                                const features::SpeakerProfile &target,
                                const corpus::SpeakerRegistry &registry,
                                const ProfileMap &profiles,
                                const std::optional<std::string> &override_id) {
  if (override_id) {
    if (!registry.Contains(*override_id)) Fail(ErrorCode::kUnknownSpeaker, *override_id);
    if (registry.Get(*override_id).language_id != language_id) {
      Fail(ErrorCode::kInvalidArgument,
           "override speaker " + *override_id + " is not native in " + language_id);
    }
    return *override_id;
  }
  const std::vector<std::string> natives = registry.NativeSpeakers(language_id);
  if (natives.empty()) Fail(ErrorCode::kNoNativeSpeaker, language_id);
  std::string best;
  double best_dist = 0.0;
  // NativeSpeakers is sorted, so a strict comparison keeps the smallest id.
  for (const std::string &id : natives) {
    const double d = std::abs(ProfileOf(profiles, id).logf0_mean - target.logf0_mean);
    if (best.empty() || d < best_dist) {
      best = id;
      best_dist = d;
    }
  }
  return best;
}

frontend::TokenSequence SilFrontend::Process(const std::string &text,
                                             const std::string &language_id) const {
  const frontend::TokenSequence plain =
      frontend::Tokenize(corpus::NormalizeTranscript(text), language_id);
  return frontend::PredictAndInsertSil(predictor_, plain, threshold_);
}

SynthesisMode ModeOf(const SynthesisRequest &request, const corpus::SpeakerRegistry &registry) {
  if (!registry.Contains(request.target_speaker_id)) {
    Fail(ErrorCode::kUnknownSpeaker, request.target_speaker_id);
  }
  const auto langs = registry.Languages();
  if (std::find(langs.begin(), langs.end(), request.language_id) == langs.end()) {
    Fail(ErrorCode::kUnknownLanguage, request.language_id);
  }
  return registry.Get(request.target_speaker_id).language_id == request.language_id
             ? SynthesisMode::kMono
             : SynthesisMode::kCross;
}

SynthesisResult Synthesize(const SynthesisRequest &request, const TextFrontend &frontend,
                           const AcousticBackend &am, const VocoderBackend &voc,
                           const ProfileMap &profiles, const corpus::SpeakerRegistry &registry) {
  const SynthesisMode mode = ModeOf(request, registry);
  const features::SpeakerProfile &target = ProfileOf(profiles, request.target_speaker_id);
  if (mode == SynthesisMode::kMono && request.native_override &&
      *request.native_override != request.target_speaker_id) {
    Fail(ErrorCode::kInvalidArgument, "a native override only applies to cross-lingual requests");
  }

  SynthesisResult result;
  SynthesisTrace &trace = result.trace;
  trace.mode = mode;
  trace.voc_speaker_id = request.target_speaker_id;
  trace.am_speaker_id =
      mode == SynthesisMode::kMono
          ? request.target_speaker_id
          : ChooseNativeSpeaker(request.language_id, target, registry, profiles,
                                request.native_override);
  const features::SpeakerProfile &am_profile = ProfileOf(profiles, trace.am_speaker_id);

  const frontend::TokenSequence tokens = frontend.Process(request.text, request.language_id);
  trace.tokens = tokens.tokens;
  txt2vec::AcousticInference inf = am.Infer(tokens, am_profile.embedding, request.language_id);
  trace.durations = inf.durations;
  trace.frames = static_cast<std::size_t>(
      std::accumulate(inf.durations.begin(), inf.durations.end(), 0L));
  if (inf.vq.rows() != trace.frames || inf.aux.rows() != trace.frames) {
    Fail(ErrorCode::kLengthMismatch, "acoustic model frames do not match its durations");
  }
  MatrixD aux = std::move(inf.aux);
  if (mode == SynthesisMode::kCross) {
    aux = PitchRescale(aux, am_profile, target);
    trace.pitch_rescaled = true;
  }
  result.waveform = voc.Generate(inf.vq, aux, target.embedding);
  trace.audio_length = result.waveform.size();
  if (trace.audio_length != trace.frames * voc.hop()) {
    Fail(ErrorCode::kLengthMismatch, "vocoder produced " + std::to_string(trace.audio_length) +
                                         " samples for " + std::to_string(trace.frames) +
                                         " frames");
  }
  LogLine("synth")
      .kv("mode", mode == SynthesisMode::kMono ? "mono" : "cross")
      .kv("am", trace.am_speaker_id)
      .kv("voc", trace.voc_speaker_id)
      .kv("frames", trace.frames)
      .kv("samples", trace.audio_length);
  return result;
}

std::string FormatTrace(const SynthesisTrace &t) {
  std::ostringstream os;
  os << "mode\tam_speaker_id\tvoc_speaker_id\tpitch_rescaled\tdurations\tT\taudio_length\n";
  os << (t.mode == SynthesisMode::kMono ? "mono" : "cross") << '\t' << t.am_speaker_id << '\t'
     << t.voc_speaker_id << '\t' << (t.pitch_rescaled ? "true" : "false") << '\t';
  for (std::size_t i = 0; i < t.durations.size(); ++i) os << (i ? "," : "") << t.durations[i];
  os << '\t' << t.frames << '\t' << t.audio_length << '\n';
  return os.str();
}

void WriteTrace(const std::filesystem::path &path, const SynthesisTrace &trace) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << FormatTrace(trace);
}

}  // namespace vqtts::synthesis
