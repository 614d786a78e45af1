// src/pipeline/prepare.cc

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

#include <atomic>
#include <fstream>
#include <map>
#include <thread>

#include "internal.h"
#include "vqtts/alignment/mas.h"
#include "vqtts/base/error.h"
#include "vqtts/base/log.h"
#include "vqtts/corpus/audio.h"
#include "vqtts/corpus/store.h"
#include "vqtts/dsp/mel.h"
#include "vqtts/features/aux.h"
#include "vqtts/features/speaker.h"
#include "vqtts/pipeline/pipeline.h"

namespace vqtts::pipeline {
namespace fs = std::filesystem;
using internal::FormatDouble;
using internal::ReadFileBytes;

namespace {

// Config sections that change per-utterance outputs.
std::string UtteranceConfigText(const PipelineConfig &cfg) {
  return internal::SectionText(cfg.raw, "features") + internal::SectionText(cfg.raw, "align");
}

struct UttWork {
  const corpus::Utterance *utt = nullptr;
  std::string hyp;
  std::string hash;
  // Outputs.
  MatrixD mel;
  MatrixD aux;
  std::vector<double> spk;
  UtteranceAlignment metrics;
  bool reused = false;
  // First failure.
  bool failed = false;
  ErrorCode code = ErrorCode::kInvalidArgument;
  std::string step;
  std::string message;
};

std::string DoneLine(const std::string &hash, const UtteranceAlignment &m) {
  return hash + '\t' + FormatDouble(m.norm_loglik) + '\t' + FormatDouble(m.focus_rate) + '\t' +
         std::to_string(m.frames) + '\t' + std::to_string(m.silences);
}

// Per-utterance marker: reused only when the hash matches and every output
// file is still present.
bool TryReuse(const corpus::FeatureStore &store, UttWork &w) {
  const std::string id = w.utt->utt_id;
  const std::string line = internal::ReadMarker(store.UttDir(id) / ".done");
  if (line.empty()) return false;
  const auto fields = SplitString(line, '\t');
  if (fields.size() != 5 || fields[0] != w.hash) return false;
  for (const fs::path &p : {store.AuxPath(id), store.SpkPath(id), store.CtmPath(id),
                            store.HypPath(id)}) {
    if (!fs::exists(p)) return false;
  }
  w.aux = store.ReadAux(id);
  w.spk = store.ReadSpk(id);
  w.metrics.utt_id = id;
  w.metrics.speaker_id = w.utt->speaker_id;
  w.metrics.norm_loglik = std::stod(fields[1]);
  w.metrics.focus_rate = std::stod(fields[2]);
  w.metrics.frames = std::stoi(fields[3]);
  w.metrics.silences = std::stoi(fields[4]);
  return true;
}

void ProcessUtterance(const PipelineConfig &cfg, const corpus::FeatureStore &store, UttWork &w) {
  const corpus::Utterance &u = *w.utt;
  w.step = "audio";
  const corpus::Waveform wave = corpus::ReadWav(cfg.corpus / u.audio_ref);
  if (wave.sample_rate != cfg.features.sample_rate) {
    Fail(ErrorCode::kUnsupportedAudio, "sample rate " + std::to_string(wave.sample_rate) +
                                           ", configured " +
                                           std::to_string(cfg.features.sample_rate));
  }
  if (wave.samples.size() < cfg.features.hop) {
    Fail(ErrorCode::kTooShort, "audio shorter than one hop");
  }
  w.step = "features";
  w.mel = dsp::LogMel(wave.samples, cfg.features.Mel());
  w.reused = TryReuse(store, w);
  if (w.reused) return;
  w.aux = features::ExtractAux(wave.samples, cfg.features);
  w.spk = features::SurrogateSpeakerEmbedding(wave.samples, cfg.features);

  w.step = "align";
  const frontend::TokenSequence plain = frontend::Tokenize(u.transcript, u.language_id);
  const frontend::TokenSequence cand = frontend::InsertCandidateSils(plain);
  const std::vector<bool> skippable = frontend::SkippableMask(cand);
  const alignment::ScoreMatrix scores = alignment::ScoreFramesGaussian(w.mel, cand, cfg.scorer);
  const alignment::AlignmentPath path = alignment::MasViterbi(scores, skippable);
  const std::vector<int> durations = alignment::DurationsFromPath(path, cand.size(), skippable);
  const alignment::FinalAlignment fin =
      alignment::FinalizeAlignment(cand, durations, cfg.min_sil_frames);
  w.metrics.utt_id = u.utt_id;
  w.metrics.speaker_id = u.speaker_id;
  w.metrics.norm_loglik = path.normalized_loglik;
  w.metrics.focus_rate = alignment::FocusRate(alignment::SoftAttention(scores, skippable));
  w.metrics.frames = static_cast<int>(w.mel.rows());
  w.metrics.silences = 0;
  for (bool f : fin.sil_flags) w.metrics.silences += f ? 1 : 0;

  w.step = "write";
  fs::create_directories(store.UttDir(u.utt_id));
  fs::remove(store.UttDir(u.utt_id) / ".done");
  store.WriteAux(u.utt_id, w.aux);
  store.WriteSpk(u.utt_id, w.spk);
  store.WriteAlignment(u.utt_id, alignment::ToCtm(fin.tokens, fin.durations));
  store.WriteHyp(u.utt_id, w.hyp);
}

void RunWorkers(int workers, std::vector<UttWork> &work,
                const std::function<void(UttWork &)> &fn) {
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) {
      UttWork &w = work[i];
      try {
        fn(w);
      } catch (const Error &e) {
        w.failed = true;
        w.code = e.code();
        w.message = e.what();
      } catch (const std::exception &e) {
        w.failed = true;
        w.code = ErrorCode::kInvalidArgument;
        w.message = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(work.size())));
  std::vector<std::thread> threads;
  for (int t = 1; t < n; ++t) threads.emplace_back(loop);
  loop();
  for (auto &t : threads) t.join();
  for (const UttWork &w : work) {
    if (w.failed) {
      Fail(w.code, "utterance " + w.utt->utt_id + " failed at " + w.step + ": " + w.message);
    }
  }
}

void WriteAlignMetrics(const fs::path &path, const std::vector<UttWork> &work) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << "utt_id\tspeaker\tnorm_loglik\tfocus_rate\tframes\tsilences\n";
  for (const UttWork &w : work) {
    const auto &m = w.metrics;
    out << m.utt_id << '\t' << m.speaker_id << '\t' << FormatDouble(m.norm_loglik) << '\t'
        << FormatDouble(m.focus_rate) << '\t' << m.frames << '\t' << m.silences << '\n';
  }
  if (!out) Fail(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace

std::vector<UtteranceAlignment> ReadAlignMetrics(const fs::path &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot read " + path.string());
  std::vector<UtteranceAlignment> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    if (++line_no == 1 || Trim(line).empty()) continue;
    const auto f = SplitString(line, '\t');
    if (f.size() != 6) Fail(ErrorCode::kMalformedRecord, path.string() + ":" + std::to_string(line_no));
    try {
      out.push_back({f[0], f[1], std::stod(f[2]), std::stod(f[3]), std::stoi(f[4]),
                     std::stoi(f[5])});
    } catch (const std::exception &) {
      Fail(ErrorCode::kMalformedRecord, path.string() + ":" + std::to_string(line_no));
    }
  }
  return out;
}

PrepareSummary Prepare(const PipelineConfig &cfg) {
  corpus::SpeakerRegistry registry;
  std::vector<corpus::Utterance> utts;
  if (!cfg.speakers.empty()) {
    registry = corpus::SpeakerRegistry::Load(cfg.speakers);
    utts = corpus::LoadManifest(cfg.manifest, &registry);
  } else {
    utts = corpus::LoadManifest(cfg.manifest);
    registry = corpus::SpeakerRegistry::FromUtterances(utts);
  }
  const auto hyps = utts.empty() ? std::map<std::string, std::string>{}
                                 : corpus::LoadHypotheses(cfg.hyps);

  // Content hash over everything prepare reads.
  const std::string utt_config = UtteranceConfigText(cfg);
  Fnv1a global;
  global.Update(utt_config);
  global.Update(internal::SectionText(cfg.raw, "quantizer"));
  global.Update("seed=" + std::to_string(cfg.quantizer.seed));
  global.Update(corpus::FormatManifest(utts));
  for (const auto &[id, info] : registry.entries()) global.Update(id + '\t' + info.language_id + '\n');

  std::vector<UttWork> work(utts.size());
  for (std::size_t i = 0; i < utts.size(); ++i) {
    const corpus::Utterance &u = utts[i];
    auto it = hyps.find(u.utt_id);
    if (it == hyps.end()) {
      Fail(ErrorCode::kMalformedRecord, "utterance " + u.utt_id + " has no hypothesis transcript");
    }
    if (u.sample_rate != cfg.features.sample_rate) {
      Fail(ErrorCode::kUnsupportedAudio, "utterance " + u.utt_id + ": manifest sample rate " +
                                             std::to_string(u.sample_rate) + ", configured " +
                                             std::to_string(cfg.features.sample_rate));
    }
    work[i].utt = &u;
    work[i].hyp = it->second;
    Fnv1a h;
    h.Update(utt_config);
    h.Update(corpus::FormatManifest({u}));
    h.Update(it->second);
    h.Update(ReadFileBytes(cfg.corpus / u.audio_ref));
    work[i].hash = h.HexDigest();
    global.Update(work[i].hash);
  }
  PrepareSummary summary;
  summary.hash = global.HexDigest();
  summary.utterances = utts.size();

  const fs::path marker = cfg.MarkerPath("prepare");
  if (internal::ReadMarker(marker) == summary.hash) {
    summary.up_to_date = true;
    LogLine("prepare").kv("status", "up_to_date").kv("utts", utts.size());
    return summary;
  }
  fs::create_directories(cfg.store);
  fs::create_directories(cfg.work);
  fs::remove(marker);
  const corpus::FeatureStore store(cfg.store);

  RunWorkers(cfg.workers, work, [&](UttWork &w) { ProcessUtterance(cfg, store, w); });
  for (const UttWork &w : work) summary.reused += w.reused ? 1 : 0;

  registry.Save(cfg.RegistryPath());
  WriteAlignMetrics(cfg.AlignMetricsPath(), work);
  std::map<std::string, features::SpeakerProfile> profiles;
  if (!utts.empty()) {
    std::vector<MatrixD> mels;
    for (const UttWork &w : work) mels.push_back(w.mel);
    const auto quantizer = features::SurrogateQuantizer::Fit(mels, cfg.quantizer);
    quantizer.Save(cfg.QuantizerDir());
    for (UttWork &w : work) {
      w.step = "quantize";
      const MatrixI vq = quantizer.QuantizeFrames(w.mel);
      if (vq.rows() != w.aux.rows()) {
        Fail(ErrorCode::kLengthMismatch, "utterance " + w.utt->utt_id + ": vq has " +
                                             std::to_string(vq.rows()) + " frames, aux " +
                                             std::to_string(w.aux.rows()));
      }
      store.WriteVq(w.utt->utt_id, vq);
      internal::WriteMarker(store.UttDir(w.utt->utt_id) / ".done", DoneLine(w.hash, w.metrics));
    }
    std::map<std::string, std::pair<std::vector<std::vector<double>>, std::vector<MatrixD>>> by_spk;
    for (const UttWork &w : work) {
      by_spk[w.utt->speaker_id].first.push_back(w.spk);
      by_spk[w.utt->speaker_id].second.push_back(w.aux);
    }
    for (const auto &[spk, data] : by_spk) {
      try {
        profiles[spk] = features::BuildSpeakerProfile(spk, data.first, data.second);
      } catch (const Error &e) {
        Fail(e.code(), "speaker profile " + spk + ": " + e.what());
      }
    }
  }
  features::SaveProfiles(cfg.ProfilesPath(), profiles);
  internal::WriteMarker(marker, summary.hash);
  LogLine("prepare")
      .kv("status", "done")
      .kv("utts", utts.size())
      .kv("reused", summary.reused)
      .kv("speakers", profiles.size())
      .kv("hash", summary.hash);
  return summary;
}

}  // namespace vqtts::pipeline
