// src/frontend/sil_predictor.cc

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

#include "vqtts/frontend/sil_predictor.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "vqtts/base/error.h"
#include "vqtts/base/log.h"
#include "vqtts/base/text.h"
#include "vqtts/nn/ops.h"

namespace vqtts::frontend {
namespace fs = std::filesystem;

std::vector<bool> LabelsFromAlignedTokens(const TokenSequence &plain,
                                          const std::vector<std::string> &aligned) {
  std::vector<bool> labels(plain.boundaries.size(), false);
  std::size_t ci = 0, bi = 0;
  bool pending_sil = false;
  for (const std::string &tok : aligned) {
    if (tok == kSilToken) {
      pending_sil = true;
      continue;
    }
    if (ci >= plain.size() || plain.tokens[ci] != tok) {
      Fail(ErrorCode::kMalformedRecord,
           "aligned token '" + tok + "' does not match the transcript");
    }
    while (bi < plain.boundaries.size() &&
           static_cast<std::size_t>(plain.boundaries[bi]) < ci) {
      ++bi;
    }
    const bool at_boundary =
        bi < plain.boundaries.size() && static_cast<std::size_t>(plain.boundaries[bi]) == ci;
    if (pending_sil) {
      if (!at_boundary) Fail(ErrorCode::kMalformedRecord, "<sil> inside a word");
      labels[bi] = true;
    }
    pending_sil = false;
    ++ci;
  }
  if (ci != plain.size() || pending_sil) {
    Fail(ErrorCode::kMalformedRecord, "alignment does not cover the transcript");
  }
  return labels;
}

std::vector<SilTargets> BuildSilTargets(const std::vector<corpus::Utterance> &utts,
                                        const corpus::FeatureStore &store) {
  std::vector<SilTargets> out;
  out.reserve(utts.size());
  for (const corpus::Utterance &u : utts) {
    if (!fs::exists(store.CtmPath(u.utt_id))) {
      Fail(ErrorCode::kMissingAlignment, u.utt_id);
    }
    std::vector<std::string> aligned;
    for (const auto &e : store.ReadAlignment(u.utt_id)) aligned.push_back(e.token);
    const TokenSequence plain = Tokenize(u.transcript, u.language_id);
    out.push_back({u.utt_id, LabelsFromAlignedTokens(plain, aligned)});
  }
  return out;
}

void WriteSilTargets(const fs::path &path, const std::vector<SilTargets> &targets) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  for (const SilTargets &t : targets) {
    out << t.utt_id << '\t';
    for (std::size_t i = 0; i < t.labels.size(); ++i) {
      out << (i ? "," : "") << (t.labels[i] ? '1' : '0');
    }
    out << '\n';
  }
}

std::vector<SilTargets> ReadSilTargets(const fs::path &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot read " + path.string());
  std::vector<SilTargets> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      Fail(ErrorCode::kMalformedRecord, path.string() + ":" + std::to_string(line_no));
    }
    SilTargets t{line.substr(0, tab), {}};
    const std::string rest = line.substr(tab + 1);
    if (!rest.empty()) {
      for (const std::string &f : SplitString(rest, ',')) {
        if (f != "0" && f != "1") {
          Fail(ErrorCode::kMalformedRecord, path.string() + ":" + std::to_string(line_no));
        }
        t.labels.push_back(f == "1");
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

SilPredictorConfig SilPredictorConfig::FromConfig(const Config &c) {
  SilPredictorConfig p;
  p.width = c.GetInt("width", p.width);
  p.heads = c.GetInt("heads", p.heads);
  p.blocks = c.GetInt("blocks", p.blocks);
  p.ffn_width = c.GetInt("ffn_width", p.ffn_width);
  p.reader = c.GetString("reader", p.reader);
  p.seed = c.GetInt("seed", static_cast<std::int64_t>(p.seed));
  if (p.width == 0 || p.heads == 0 || p.width % p.heads != 0 || p.ffn_width == 0) {
    Fail(ErrorCode::kBadConfig, "silence predictor: width must be a positive multiple of heads");
  }
  if (p.reader != "prev" && p.reader != "next") {
    Fail(ErrorCode::kBadConfig, "silence predictor: reader must be prev or next");
  }
  return p;
}

void SilPredictorConfig::ToConfig(Config &c) const {
  c.Set("width", std::to_string(width));
  c.Set("heads", std::to_string(heads));
  c.Set("blocks", std::to_string(blocks));
  c.Set("ffn_width", std::to_string(ffn_width));
  c.Set("reader", reader);
  c.Set("seed", std::to_string(seed));
}

SilPredictor::SilPredictor(const SilPredictorConfig &config, std::vector<char32_t> alphabet,
                           std::vector<std::string> languages)
    : config_(config), alphabet_(std::move(alphabet)), languages_(std::move(languages)) {
  std::sort(alphabet_.begin(), alphabet_.end());
  alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()), alphabet_.end());
  std::sort(languages_.begin(), languages_.end());
  languages_.erase(std::unique(languages_.begin(), languages_.end()), languages_.end());
  if (languages_.empty()) Fail(ErrorCode::kInvalidArgument, "no languages");
  for (std::size_t i = 0; i < alphabet_.size(); ++i) char_id_[alphabet_[i]] = static_cast<int>(i) + 1;

  store_ = std::make_unique<nn::ParamStore>(config_.seed);
  const double emb_std = 1.0 / std::sqrt(static_cast<double>(config_.width));
  char_table_ = store_->Normal("char_emb", alphabet_.size() + 1, config_.width, emb_std);
  lang_table_ = store_->Normal("lang_emb", languages_.size(), config_.width, emb_std);
  for (std::size_t b = 0; b < config_.blocks; ++b) {
    blocks_.emplace_back(*store_, "block" + std::to_string(b), config_.width, config_.heads,
                         config_.ffn_width);
  }
  final_norm_ = nn::LayerNorm(*store_, "final_ln", config_.width);
  // A small output layer starts the classifier near p = 0.5.
  head_ = nn::Linear(*store_, "head", config_.width, 2, true, 0.05);
}

SilPredictor SilPredictor::ForData(const SilPredictorConfig &config,
                                   const std::vector<TokenSequence> &seqs) {
  std::set<char32_t> chars;
  std::set<std::string> langs;
  for (const TokenSequence &s : seqs) {
    langs.insert(s.language_id);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.IsSil(i)) continue;
      for (char32_t cp : DecodeUtf8(s.tokens[i])) chars.insert(cp);
    }
  }
  return SilPredictor(config, {chars.begin(), chars.end()}, {langs.begin(), langs.end()});
}

Config SilPredictor::ToConfig() const {
  Config c;
  config_.ToConfig(c);
  std::string vocab;
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    vocab += (i ? "," : "") + std::to_string(static_cast<std::uint32_t>(alphabet_[i]));
  }
  c.Set("alphabet", vocab);
  std::string langs;
  for (std::size_t i = 0; i < languages_.size(); ++i) langs += (i ? "," : "") + languages_[i];
  c.Set("languages", langs);
  return c;
}

void SilPredictor::Save(const fs::path &dir, const nn::Adam *optim) const {
  nn::SaveCheckpoint(dir, ToConfig(), *store_, optim);
}

SilPredictor SilPredictor::Load(const fs::path &dir, nn::Adam *optim) {
  const Config c = nn::ReadCheckpointConfig(dir);
  std::vector<char32_t> alphabet;
  for (std::int64_t v : c.GetIntList("alphabet", {})) alphabet.push_back(static_cast<char32_t>(v));
  const std::vector<std::string> langs = SplitString(c.GetString("languages", ""), ',');
  SilPredictor model(SilPredictorConfig::FromConfig(c), alphabet, langs);
  nn::LoadCheckpointParams(dir, *model.store_, optim);
  return model;
}

std::vector<int> SilPredictor::Ids(const TokenSequence &seq) const {
  std::vector<int> ids;
  ids.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto cps = DecodeUtf8(seq.tokens[i]);
    auto it = cps.size() == 1 ? char_id_.find(cps[0]) : char_id_.end();
    ids.push_back(it == char_id_.end() ? 0 : it->second);
  }
  return ids;
}

nn::Tensor SilPredictor::Logits(const TokenSequence &seq) const {
  if (seq.HasSil()) Fail(ErrorCode::kAlreadyHasSil, "predictor input must not contain <sil>");
  if (seq.tokens.empty()) Fail(ErrorCode::kEmptyTokens, "empty token sequence");
  auto lang = std::find(languages_.begin(), languages_.end(), seq.language_id);
  if (lang == languages_.end()) Fail(ErrorCode::kUnknownLanguage, seq.language_id);
  const int lang_id = static_cast<int>(lang - languages_.begin());

  const std::size_t n = seq.size();
  nn::Tensor x = nn::Embedding(char_table_, Ids(seq));
  x = nn::Add(x, nn::SinusoidalPositions(n, config_.width));
  x = nn::AddRowVector(x, nn::Embedding(lang_table_, {lang_id}));
  for (const auto &block : blocks_) x = block(x);
  x = final_norm_(x);
  std::vector<int> rows;
  for (int b : seq.boundaries) rows.push_back(config_.reader == "prev" ? b - 1 : b);
  if (rows.empty()) return nn::Tensor::Zeros(0, 2);
  // Gather rows by routing them through a one-hot selection matrix.
  std::vector<double> sel(rows.size() * n, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) sel[i * n + rows[i]] = 1.0;
  const nn::Tensor picked = nn::MatMul(nn::Tensor::Constant(rows.size(), n, sel), x);
  return head_(picked);
}

std::vector<double> SilPredictor::Probabilities(const TokenSequence &seq) const {
  nn::NoGradGuard guard;
  const nn::Tensor logits = Logits(seq);
  std::vector<double> p(logits.rows());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = 1.0 / (1.0 + std::exp(logits.at(i, 0) - logits.at(i, 1)));
  }
  return p;
}

namespace {

std::vector<int> LabelIds(const std::vector<bool> &labels) {
  std::vector<int> t(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) t[i] = labels[i] ? 1 : 0;
  return t;
}

void CheckExample(const SilExample &ex) {
  if (ex.labels.size() != ex.tokens.boundaries.size()) {
    Fail(ErrorCode::kShapeMismatch, "label count != boundary count");
  }
}

}  // namespace

std::pair<double, double> EvaluateSilPredictor(const SilPredictor &model,
                                               const std::vector<SilExample> &data) {
  nn::NoGradGuard guard;
  double loss = 0.0;
  std::size_t n = 0, correct = 0;
  for (const SilExample &ex : data) {
    CheckExample(ex);
    if (ex.labels.empty()) continue;
    const nn::Tensor logits = model.Logits(ex.tokens);
    loss += nn::CrossEntropySum(logits, LabelIds(ex.labels),
                                std::vector<double>(ex.labels.size(), 1.0))
                .item();
    for (std::size_t i = 0; i < ex.labels.size(); ++i) {
      const bool pred = logits.at(i, 1) >= logits.at(i, 0);
      correct += pred == ex.labels[i];
    }
    n += ex.labels.size();
  }
  if (n == 0) Fail(ErrorCode::kNoBoundaries, "no labelled boundaries");
  return {loss / n, static_cast<double>(correct) / n};
}

SilTrainResult TrainSilPredictor(SilPredictor &model, const std::vector<SilExample> &data,
                                 const SilTrainOptions &opts) {
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < data.size(); ++i) {
    CheckExample(data[i]);
    if (!data[i].labels.empty()) usable.push_back(i);
  }
  if (usable.empty()) Fail(ErrorCode::kNoBoundaries, "no training utterance has a boundary");
  if (opts.batch_size == 0) Fail(ErrorCode::kBadConfig, "batch_size must be positive");

  nn::Adam adam(model.params(), opts.adam);
  int start_epoch = 0;
  if (opts.resume && !opts.ckpt_root.empty()) {
    const fs::path last = nn::LatestCheckpoint(opts.ckpt_root);
    if (!last.empty()) {
      nn::LoadCheckpointParams(last, model.params(), &adam);
      start_epoch = static_cast<int>(nn::ReadCheckpointConfig(last).GetInt("train.epochs_done", 0));
    }
  }

  SilTrainResult result;
  result.initial_loss = EvaluateSilPredictor(model, data).first;
  std::mt19937_64 rng(opts.seed);
  for (int epoch = 0; epoch < start_epoch; ++epoch) std::shuffle(usable.begin(), usable.end(), rng);
  for (int epoch = start_epoch; epoch < opts.epochs; ++epoch) {
    std::shuffle(usable.begin(), usable.end(), rng);
    for (std::size_t begin = 0; begin < usable.size(); begin += opts.batch_size) {
      const std::size_t end = std::min(usable.size(), begin + opts.batch_size);
      model.params().ZeroGrad();
      std::vector<nn::Tensor> terms;
      double count = 0;
      for (std::size_t k = begin; k < end; ++k) {
        const SilExample &ex = data[usable[k]];
        terms.push_back(nn::CrossEntropySum(model.Logits(ex.tokens), LabelIds(ex.labels),
                                            std::vector<double>(ex.labels.size(), 1.0)));
        count += ex.labels.size();
      }
      nn::Tensor loss = terms[0];
      for (std::size_t k = 1; k < terms.size(); ++k) loss = nn::Add(loss, terms[k]);
      nn::Backward(nn::Scale(loss, 1.0 / count));
      adam.Step();
    }
    const auto [loss, acc] = EvaluateSilPredictor(model, data);
    result.epoch_losses.push_back(loss);
    LogLine("train-sil").kv("epoch", epoch + 1).kv("loss", loss).kv("acc", acc);
  }
  const auto [loss, acc] = EvaluateSilPredictor(model, data);
  result.final_loss = loss;
  result.train_accuracy = acc;
  result.steps = adam.steps();
  if (!opts.ckpt_root.empty()) {
    Config c = model.ToConfig();
    c.Set("train.epochs_done", std::to_string(std::max(opts.epochs, start_epoch)));
    nn::SaveCheckpoint(opts.ckpt_root / ("step" + std::to_string(adam.steps())), c,
                       model.params(), &adam);
  }
  return result;
}

TokenSequence InsertSilsFromProbabilities(const TokenSequence &tokens,
                                          const std::vector<double> &probs, double threshold) {
  if (probs.size() != tokens.boundaries.size()) {
    Fail(ErrorCode::kShapeMismatch, "one probability per boundary expected");
  }
  std::vector<bool> fire(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) fire[i] = probs[i] >= threshold;
  return InsertSils(tokens, fire);
}

TokenSequence PredictAndInsertSil(const SilPredictor &model, const TokenSequence &tokens,
                                  double threshold) {
  if (tokens.HasSil()) Fail(ErrorCode::kAlreadyHasSil, "sequence already has <sil>");
  return InsertSilsFromProbabilities(tokens, model.Probabilities(tokens), threshold);
}

}  // namespace vqtts::frontend
