// src/pipeline/train.cc

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

#include <map>

#include "internal.h"
#include "vqtts/base/error.h"
#include "vqtts/base/log.h"
#include "vqtts/corpus/audio.h"
#include "vqtts/corpus/store.h"
#include "vqtts/features/aux.h"
#include "vqtts/features/speaker.h"
#include "vqtts/pipeline/pipeline.h"

namespace vqtts::pipeline {
namespace fs = std::filesystem;

namespace {

// Hash of a training stage: upstream selection, the model and training
// sections, the global seed and the effective step budget.
std::string TrainHash(const PipelineConfig &cfg, const std::string &model_section,
                      const std::string &train_section, std::int64_t max_steps) {
  Fnv1a h;
  h.Update(internal::RequireMarker(cfg, "select"));
  h.Update(internal::SectionText(cfg.raw, model_section));
  h.Update(internal::SectionText(cfg.raw, train_section));
  h.Update("seed=" + std::to_string(cfg.seed) + "\nmax_steps=" + std::to_string(max_steps));
  return h.HexDigest();
}

std::int64_t StepBudget(const TrainFlags &flags, const Config &train, std::int64_t def) {
  const std::int64_t n = flags.max_steps ? *flags.max_steps : train.GetInt("max_steps", def);
  if (n < 0) Fail(ErrorCode::kBadConfig, "max_steps must be non-negative");
  return n;
}

// The character sequence of `u` with the `<sil>` tokens of its alignment.
frontend::TokenSequence AlignedTokens(const corpus::Utterance &u,
                                      const std::vector<corpus::CtmEntry> &ctm) {
  std::vector<std::string> aligned;
  for (const auto &e : ctm) aligned.push_back(e.token);
  const frontend::TokenSequence plain = frontend::Tokenize(u.transcript, u.language_id);
  const frontend::TokenSequence seq =
      frontend::InsertSils(plain, frontend::LabelsFromAlignedTokens(plain, aligned));
  if (seq.tokens != aligned) {
    Fail(ErrorCode::kMalformedRecord, "alignment of " + u.utt_id + " does not match its transcript");
  }
  return seq;
}

features::AuxStats TrainingAuxStats(const PipelineConfig &cfg,
                                    const std::vector<corpus::Utterance> &utts) {
  const corpus::FeatureStore store(cfg.store);
  std::vector<MatrixD> aux;
  for (const auto &u : utts) aux.push_back(store.ReadAux(u.utt_id));
  return features::ComputeAuxStats(aux);
}

void SetAuxStats(Config &c, const features::AuxStats &s) {
  c.Set("aux.logf0_mean", internal::FormatDouble(s.logf0_mean));
  c.Set("aux.logf0_std", internal::FormatDouble(s.logf0_std));
  c.Set("aux.energy_mean", internal::FormatDouble(s.energy_mean));
  c.Set("aux.energy_std", internal::FormatDouble(s.energy_std));
}

const std::vector<double> &ProfileEmbedding(const synthesis::ProfileMap &profiles,
                                            const std::string &speaker) {
  auto it = profiles.find(speaker);
  if (it == profiles.end()) Fail(ErrorCode::kMissingStats, "no profile for speaker " + speaker);
  return it->second.embedding;
}

template <typename Loader>
bool UpToDate(const PipelineConfig &cfg, const std::string &stage, const std::string &hash,
              const fs::path &root, const Loader &load, TrainSummary &summary) {
  if (internal::ReadMarker(cfg.MarkerPath(stage)) != hash) return false;
  const fs::path latest = nn::LatestCheckpoint(root);
  if (latest.empty()) return false;
  load(latest);  // a damaged checkpoint fails here rather than being reused
  summary.up_to_date = true;
  summary.checkpoint = latest;
  summary.steps = nn::CheckpointStep(latest);
  LogLine(stage).kv("status", "up_to_date").kv("checkpoint", latest.string());
  return true;
}

}  // namespace

TrainSummary TrainSil(const PipelineConfig &cfg, const TrainFlags &flags) {
  const Config train = cfg.raw.Section("train_sil");
  const std::int64_t epochs = flags.max_steps ? *flags.max_steps : train.GetInt("epochs", 20);
  if (epochs < 0) Fail(ErrorCode::kBadConfig, "epochs must be non-negative");
  const std::string hash = TrainHash(cfg, "silpred", "train_sil", epochs);
  const fs::path root = cfg.ckpt / "silpred";
  TrainSummary summary;
  if (UpToDate(cfg, "train-sil", hash, root,
               [](const fs::path &p) { frontend::SilPredictor::Load(p); }, summary)) {
    return summary;
  }
  fs::remove(cfg.MarkerPath("train-sil"));

  const auto utts = TrainingSet(cfg);
  const corpus::FeatureStore store(cfg.store);
  const auto targets = frontend::BuildSilTargets(utts, store);
  frontend::WriteSilTargets(cfg.SilTargetsPath(), targets);
  std::vector<frontend::SilExample> data;
  std::vector<frontend::TokenSequence> seqs;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    data.push_back({frontend::Tokenize(utts[i].transcript, utts[i].language_id), targets[i].labels});
    seqs.push_back(data.back().tokens);
  }

  frontend::SilPredictorConfig pc = frontend::SilPredictorConfig::FromConfig(cfg.raw.Section("silpred"));
  pc.seed = cfg.StageSeed("silpred", 2);
  if (!flags.resume) fs::remove_all(root);
  const fs::path latest = nn::LatestCheckpoint(root);
  frontend::SilPredictor model = latest.empty() ? frontend::SilPredictor::ForData(pc, seqs)
                                                : frontend::SilPredictor::Load(latest);
  frontend::SilTrainOptions opts;
  opts.epochs = static_cast<int>(epochs);
  opts.batch_size = train.GetInt("batch_size", opts.batch_size);
  opts.adam = internal::AdamFromConfig(train, opts.adam);
  opts.seed = cfg.StageSeed("train_sil", 3);
  opts.ckpt_root = root;
  opts.resume = flags.resume;
  const auto r = frontend::TrainSilPredictor(model, data, opts);

  summary.checkpoint = nn::LatestCheckpoint(root);
  summary.initial_loss = r.initial_loss;
  summary.final_loss = r.final_loss;
  summary.steps = r.steps;
  summary.accuracy = r.train_accuracy;
  internal::WriteMarker(cfg.MarkerPath("train-sil"), hash);
  LogLine("train-sil")
      .kv("status", "done")
      .kv("utts", utts.size())
      .kv("epochs", epochs)
      .kv("initial_loss", r.initial_loss)
      .kv("final_loss", r.final_loss)
      .kv("accuracy", r.train_accuracy);
  return summary;
}

txt2vec::AcousticModelConfig AcousticConfigFor(const PipelineConfig &cfg) {
  const auto utts = TrainingSet(cfg);
  const auto quantizer = features::SurrogateQuantizer::Load(cfg.QuantizerDir());
  Config c = cfg.raw.Section("am");
  c.Set("spk_dim", std::to_string(cfg.features.spk_dim));
  c.Set("groups", std::to_string(quantizer.groups()));
  c.Set("codebook_size", std::to_string(quantizer.codebook_size()));
  c.Set("seed", std::to_string(cfg.StageSeed("am", 4)));
  if (!c.Has("voicing_threshold")) {
    c.Set("voicing_threshold", internal::FormatDouble(cfg.features.voicing_threshold));
  }
  SetAuxStats(c, TrainingAuxStats(cfg, utts));
  txt2vec::AcousticModelConfig m = txt2vec::AcousticModelConfig::FromConfig(c);
  m.languages = corpus::SpeakerRegistry::Load(cfg.RegistryPath()).Languages();
  const corpus::FeatureStore store(cfg.store);
  std::vector<frontend::TokenSequence> seqs;
  for (const auto &u : utts) seqs.push_back(AlignedTokens(u, store.ReadAlignment(u.utt_id)));
  return txt2vec::AcousticModel::WithVocabulary(m, seqs);
}

std::vector<txt2vec::AcousticItem> AcousticItemsFor(const PipelineConfig &cfg,
                                                    const txt2vec::AcousticModel &model,
                                                    const std::vector<corpus::Utterance> &utts) {
  const corpus::FeatureStore store(cfg.store);
  const auto profiles = features::LoadProfiles(cfg.ProfilesPath());
  std::vector<txt2vec::AcousticItem> items;
  for (const auto &u : utts) {
    const auto ctm = store.ReadAlignment(u.utt_id);
    txt2vec::AcousticItem it;
    it.token_ids = model.TokenIds(AlignedTokens(u, ctm));
    it.token_mask.assign(it.token_ids.size(), true);
    for (const auto &e : ctm) it.durations.push_back(e.n_frames);
    it.spk = ProfileEmbedding(profiles, u.speaker_id);
    it.language = model.LanguageIndex(u.language_id);
    it.vq = store.ReadVq(u.utt_id);
    it.aux = store.ReadAux(u.utt_id);
    it.frame_mask.assign(it.vq.rows(), true);
    int total = 0;
    for (int d : it.durations) total += d;
    if (static_cast<std::size_t>(total) != it.vq.rows() || it.aux.rows() != it.vq.rows()) {
      Fail(ErrorCode::kLengthMismatch, "utterance " + u.utt_id + ": durations, vq and aux disagree");
    }
    items.push_back(std::move(it));
  }
  return items;
}

TrainSummary TrainAm(const PipelineConfig &cfg, const TrainFlags &flags) {
  const Config train = cfg.raw.Section("train_am");
  const std::int64_t max_steps = StepBudget(flags, train, 50);
  const std::string hash = TrainHash(cfg, "am", "train_am", max_steps);
  const fs::path root = cfg.ckpt / "am";
  TrainSummary summary;
  if (UpToDate(cfg, "train-am", hash, root,
               [](const fs::path &p) { txt2vec::AcousticModel::Load(p); }, summary)) {
    return summary;
  }
  fs::remove(cfg.MarkerPath("train-am"));

  const auto utts = TrainingSet(cfg);
  if (!flags.resume) fs::remove_all(root);
  const fs::path latest = nn::LatestCheckpoint(root);
  txt2vec::AcousticModel model = latest.empty() ? txt2vec::AcousticModel(AcousticConfigFor(cfg))
                                                : txt2vec::AcousticModel::Load(latest);
  const auto items = AcousticItemsFor(cfg, model, utts);
  txt2vec::AcousticTrainOptions opts;
  opts.max_steps = max_steps;
  opts.batch_size = train.GetInt("batch_size", opts.batch_size);
  opts.adam = internal::AdamFromConfig(train, opts.adam);
  opts.seed = cfg.StageSeed("train_am", 5);
  opts.ckpt_root = root;
  opts.save_every = train.GetInt("save_every", 0);
  opts.resume = flags.resume;
  const auto r = txt2vec::TrainAcousticModel(model, items, opts);

  summary.checkpoint = nn::LatestCheckpoint(root);
  summary.initial_loss = r.initial_loss;
  summary.final_loss = r.final_loss;
  summary.steps = r.steps;
  internal::WriteMarker(cfg.MarkerPath("train-am"), hash);
  LogLine("train-am")
      .kv("status", "done")
      .kv("utts", utts.size())
      .kv("steps", r.steps)
      .kv("initial_loss", r.initial_loss)
      .kv("final_loss", r.final_loss);
  return summary;
}

vec2wav::VocoderConfig VocoderConfigFor(const PipelineConfig &cfg) {
  const auto utts = TrainingSet(cfg);
  const auto quantizer = features::SurrogateQuantizer::Load(cfg.QuantizerDir());
  Config c = cfg.raw.Section("voc");
  c.Set("groups", std::to_string(quantizer.groups()));
  c.Set("codebook_size", std::to_string(quantizer.codebook_size()));
  c.Set("hop", std::to_string(cfg.features.hop));
  c.Set("sample_rate", std::to_string(cfg.features.sample_rate));
  c.Set("spk_dim", std::to_string(cfg.features.spk_dim));
  c.Set("seed", std::to_string(cfg.StageSeed("voc", 6)));
  SetAuxStats(c, TrainingAuxStats(cfg, utts));
  return vec2wav::VocoderConfig::FromConfig(c);
}

std::vector<vec2wav::VocoderItem> VocoderItemsFor(const PipelineConfig &cfg,
                                                  const std::vector<corpus::Utterance> &utts) {
  const corpus::FeatureStore store(cfg.store);
  const auto profiles = features::LoadProfiles(cfg.ProfilesPath());
  std::vector<vec2wav::VocoderItem> items;
  for (const auto &u : utts) {
    vec2wav::VocoderItem it;
    it.vq = store.ReadVq(u.utt_id);
    it.aux = store.ReadAux(u.utt_id);
    it.spk = ProfileEmbedding(profiles, u.speaker_id);
    const auto wave = corpus::ReadWav(cfg.corpus / u.audio_ref);
    try {
      it.wave = vec2wav::TrimReference(wave.samples, it.vq.rows(), cfg.features.hop);
    } catch (const Error &e) {
      Fail(e.code(), "utterance " + u.utt_id + ": " + e.what());
    }
    items.push_back(std::move(it));
  }
  return items;
}

TrainSummary TrainVoc(const PipelineConfig &cfg, const TrainFlags &flags) {
  const Config train = cfg.raw.Section("train_voc");
  const std::int64_t max_steps = StepBudget(flags, train, 100);
  const std::string hash = TrainHash(cfg, "voc", "train_voc", max_steps);
  const fs::path root = cfg.ckpt / "voc";
  TrainSummary summary;
  if (UpToDate(cfg, "train-voc", hash, root,
               [](const fs::path &p) { vec2wav::Vocoder::Load(p); }, summary)) {
    return summary;
  }
  fs::remove(cfg.MarkerPath("train-voc"));

  const auto utts = TrainingSet(cfg);
  if (!flags.resume) fs::remove_all(root);
  const fs::path latest = nn::LatestCheckpoint(root);
  vec2wav::Vocoder voc = latest.empty() ? vec2wav::Vocoder(VocoderConfigFor(cfg))
                                        : vec2wav::Vocoder::Load(latest);
  const auto items = VocoderItemsFor(cfg, utts);
  vec2wav::VocoderTrainOptions opts;
  opts.max_steps = max_steps;
  opts.batch_size = train.GetInt("batch_size", opts.batch_size);
  opts.adam = internal::AdamFromConfig(train, opts.adam);
  opts.seed = cfg.StageSeed("train_voc", 7);
  opts.ckpt_root = root;
  opts.save_every = train.GetInt("save_every", 0);
  opts.resume = flags.resume;
  const auto r = vec2wav::TrainVocoder(voc, items, opts);

  summary.checkpoint = nn::LatestCheckpoint(root);
  summary.initial_loss = r.initial_mel;
  summary.final_loss = r.final_mel;
  summary.steps = r.steps;
  internal::WriteMarker(cfg.MarkerPath("train-voc"), hash);
  LogLine("train-voc")
      .kv("status", "done")
      .kv("utts", utts.size())
      .kv("steps", r.steps)
      .kv("initial_mel", r.initial_mel)
      .kv("final_mel", r.final_mel);
  return summary;
}

}  // namespace vqtts::pipeline
