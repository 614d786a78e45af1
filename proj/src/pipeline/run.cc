// src/pipeline/run.cc

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

#include <fstream>

#include "internal.h"
#include "vqtts/base/error.h"
#include "vqtts/base/log.h"
#include "vqtts/corpus/audio.h"
#include "vqtts/pipeline/pipeline.h"

namespace vqtts::pipeline {
namespace fs = std::filesystem;

Synthesizer::Synthesizer(const PipelineConfig &cfg)
    : registry_(corpus::SpeakerRegistry::Load(cfg.RegistryPath())),
      profiles_(features::LoadProfiles(cfg.ProfilesPath())),
      sil_(frontend::SilPredictor::Load(
          internal::RequireCheckpoint(cfg.ckpt / "silpred", "train-sil"))),
      am_(txt2vec::AcousticModel::Load(internal::RequireCheckpoint(cfg.ckpt / "am", "train-am"))),
      voc_(vec2wav::Vocoder::Load(internal::RequireCheckpoint(cfg.ckpt / "voc", "train-voc"))),
      sil_threshold_(cfg.sil_threshold) {
  if (voc_.config().hop != cfg.features.hop ||
      voc_.config().sample_rate != cfg.features.sample_rate) {
    Fail(ErrorCode::kBadConfig, "vocoder checkpoint framing differs from the feature config");
  }
}

synthesis::SynthesisResult Synthesizer::Run(const synthesis::SynthesisRequest &request) const {
  const synthesis::SilFrontend frontend(sil_, sil_threshold_);
  const synthesis::ModelAcousticBackend am(am_);
  const synthesis::ModelVocoderBackend voc(voc_);
  return synthesis::Synthesize(request, frontend, am, voc, profiles_, registry_);
}

namespace {

void WriteOutputs(const synthesis::SynthesisResult &result, int sample_rate,
                  const fs::path &wav_path, const fs::path &trace_path) {
  for (const fs::path &p : {wav_path, trace_path}) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
  }
  corpus::WriteWav(wav_path, {sample_rate, result.waveform});
  synthesis::WriteTrace(trace_path, result.trace);
}

const char *ModeName(synthesis::SynthesisMode m) {
  return m == synthesis::SynthesisMode::kMono ? "mono" : "cross";
}

}  // namespace

synthesis::SynthesisResult Synthesize(const PipelineConfig &cfg,
                                      const synthesis::SynthesisRequest &request,
                                      const fs::path &wav_path, const fs::path &trace_path) {
  const Synthesizer synth(cfg);
  const auto result = synth.Run(request);
  WriteOutputs(result, synth.sample_rate(), wav_path, trace_path);
  return result;
}

void CheckDemo(const DemoResult &demo, const corpus::SpeakerRegistry &registry, std::size_t hop) {
  const auto &t = demo.trace;
  const std::string where = demo.language_id + "/" + ModeName(t.mode) + ": ";
  auto check = [&](bool ok, const std::string &what) {
    if (!ok) throw StageError("demo", where + what);
  };
  check(t.voc_speaker_id == demo.target_speaker_id, "vocoder speaker is not the target");
  if (t.mode == synthesis::SynthesisMode::kMono) {
    check(registry.Get(demo.target_speaker_id).language_id == demo.language_id,
          "mono request for a non-native speaker");
    check(t.am_speaker_id == t.voc_speaker_id, "acoustic and vocoder speakers differ");
    check(!t.pitch_rescaled, "pitch rescaled in mono mode");
  } else {
    check(t.am_speaker_id != demo.target_speaker_id, "acoustic model saw the target speaker");
    check(registry.Get(t.am_speaker_id).language_id == demo.language_id,
          "acoustic speaker is not native to the language");
    check(t.pitch_rescaled, "pitch not rescaled in cross mode");
  }
  std::size_t total = 0;
  for (int d : t.durations) total += static_cast<std::size_t>(d);
  check(total == t.frames, "durations do not sum to T");
  check(demo.waveform_length == t.frames * hop && t.audio_length == demo.waveform_length,
        "waveform length is not T * hop");
}

std::vector<DemoResult> RunAll(const PipelineConfig &cfg) {
  RunStage("prepare", [&] { Prepare(cfg); });
  RunStage("select", [&] { Select(cfg); });
  RunStage("train-sil", [&] { TrainSil(cfg); });
  RunStage("train-am", [&] { TrainAm(cfg); });
  RunStage("train-voc", [&] { TrainVoc(cfg); });

  std::vector<DemoResult> demos;
  std::unique_ptr<Synthesizer> synth;
  RunStage("synth", [&] {
    synth = std::make_unique<Synthesizer>(cfg);
    const auto &registry = synth->registry();
    const auto utts = corpus::LoadManifest(cfg.manifest, &registry);
    for (const std::string &lang : registry.Languages()) {
      std::string text = cfg.raw.GetString("synth.text." + lang, "");
      for (const auto &u : utts) {
        if (!text.empty()) break;
        if (u.language_id == lang) text = u.transcript;
      }
      if (text.empty()) Fail(ErrorCode::kEmptyText, "no demo text for language " + lang);
      std::vector<std::string> targets = {registry.NativeSpeakers(lang).front()};
      for (const std::string &spk : registry.Speakers()) {
        if (registry.Get(spk).language_id != lang) {
          targets.push_back(spk);
          break;
        }
      }
      for (const std::string &target : targets) {
        const auto result = synth->Run({text, target, lang, std::nullopt});
        DemoResult d;
        d.language_id = lang;
        d.target_speaker_id = target;
        d.trace = result.trace;
        d.waveform_length = result.waveform.size();
        const std::string stem = lang + "_" + ModeName(result.trace.mode);
        d.wav_path = cfg.DemoDir() / (stem + ".wav");
        d.trace_path = cfg.DemoDir() / (stem + ".trace.tsv");
        WriteOutputs(result, synth->sample_rate(), d.wav_path, d.trace_path);
        demos.push_back(std::move(d));
      }
    }
  });

  RunStage("demo", [&] {
    std::ofstream out(cfg.DemoDir() / "summary.tsv", std::ios::binary);
    out << "language\tmode\ttarget\tam_speaker_id\tvoc_speaker_id\tpitch_rescaled\tT\t"
           "audio_length\n";
    for (const DemoResult &d : demos) {
      CheckDemo(d, synth->registry(), synth->hop());
      out << d.language_id << '\t' << ModeName(d.trace.mode) << '\t' << d.target_speaker_id
          << '\t' << d.trace.am_speaker_id << '\t' << d.trace.voc_speaker_id << '\t'
          << (d.trace.pitch_rescaled ? "true" : "false") << '\t' << d.trace.frames << '\t'
          << d.waveform_length << '\n';
      LogLine("demo")
          .kv("lang", d.language_id)
          .kv("mode", ModeName(d.trace.mode))
          .kv("target", d.target_speaker_id)
          .kv("am", d.trace.am_speaker_id)
          .kv("frames", d.trace.frames)
          .kv("samples", d.waveform_length);
    }
    if (!out) Fail(ErrorCode::kIo, "cannot write demo summary");
  });
  LogLine("run-all").kv("status", "done").kv("demos", demos.size());
  return demos;
}

}  // namespace vqtts::pipeline
