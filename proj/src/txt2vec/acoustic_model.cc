// src/txt2vec/acoustic_model.cc

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

#include "vqtts/txt2vec/acoustic_model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "vqtts/base/error.h"
#include "vqtts/base/log.h"
#include "vqtts/base/text.h"
#include "vqtts/nn/ops.h"

namespace vqtts::txt2vec {
namespace fs = std::filesystem;

namespace {

std::string JoinInts(const std::vector<char32_t> &v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    s += (i ? "," : "") + std::to_string(static_cast<std::uint32_t>(v[i]));
  }
  return s;
}

std::string DoubleString(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Number of leading true entries; throws unless the mask is a prefix mask.
std::size_t PrefixLength(const std::vector<bool> &mask, const char *what) {
  std::size_t n = 0;
  while (n < mask.size() && mask[n]) ++n;
  for (std::size_t i = n; i < mask.size(); ++i) {
    if (mask[i]) Fail(ErrorCode::kShapeMismatch, std::string(what) + " mask is not a prefix");
  }
  return n;
}

}  // namespace

AcousticModelConfig AcousticModelConfig::FromConfig(const Config &c) {
  AcousticModelConfig m;
  m.spk_dim = c.GetInt("spk_dim", m.spk_dim);
  m.width = c.GetInt("width", m.width);
  m.heads = c.GetInt("heads", m.heads);
  m.enc_blocks = c.GetInt("enc_blocks", m.enc_blocks);
  m.dec_blocks = c.GetInt("dec_blocks", m.dec_blocks);
  m.dec_width = c.GetInt("dec_width", m.dec_width);
  m.ffn_width = c.GetInt("ffn_width", m.ffn_width);
  m.dur_width = c.GetInt("dur_width", m.dur_width);
  m.groups = c.GetInt("groups", m.groups);
  m.codebook_size = c.GetInt("codebook_size", m.codebook_size);
  m.lambda_aux = c.GetDouble("lambda_aux", m.lambda_aux);
  m.lambda_dur = c.GetDouble("lambda_dur", m.lambda_dur);
  m.detach_duration = c.GetBool("detach_duration", m.detach_duration);
  m.voicing_threshold = c.GetDouble("voicing_threshold", m.voicing_threshold);
  m.seed = c.GetInt("seed", static_cast<std::int64_t>(m.seed));
  m.aux_stats.logf0_mean = c.GetDouble("aux.logf0_mean", m.aux_stats.logf0_mean);
  m.aux_stats.logf0_std = c.GetDouble("aux.logf0_std", m.aux_stats.logf0_std);
  m.aux_stats.energy_mean = c.GetDouble("aux.energy_mean", m.aux_stats.energy_mean);
  m.aux_stats.energy_std = c.GetDouble("aux.energy_std", m.aux_stats.energy_std);
  if (c.Has("alphabet")) {
    m.alphabet.clear();
    for (std::int64_t v : c.GetIntList("alphabet", {})) m.alphabet.push_back(static_cast<char32_t>(v));
  }
  if (c.Has("languages")) m.languages = SplitString(c.GetString("languages", ""), ',');
  if (m.width == 0 || m.heads == 0 || m.width % m.heads != 0 || m.dec_width == 0 ||
      m.dec_width % m.heads != 0 || m.ffn_width == 0 || m.dur_width == 0 || m.spk_dim == 0) {
    Fail(ErrorCode::kBadConfig, "acoustic model: widths must be positive multiples of heads");
  }
  if (m.groups == 0 || m.codebook_size < 2) {
    Fail(ErrorCode::kBadConfig, "acoustic model: need groups >= 1 and codebook_size >= 2");
  }
  if (m.lambda_aux < 0 || m.lambda_dur < 0) {
    Fail(ErrorCode::kBadConfig, "acoustic model: loss weights must be non-negative");
  }
  if (m.aux_stats.logf0_std <= 0 || m.aux_stats.energy_std <= 0) {
    Fail(ErrorCode::kBadConfig, "acoustic model: aux stds must be positive");
  }
  return m;
}

Config AcousticModelConfig::ToConfig() const {
  Config c;
  c.Set("spk_dim", std::to_string(spk_dim));
  c.Set("width", std::to_string(width));
  c.Set("heads", std::to_string(heads));
  c.Set("enc_blocks", std::to_string(enc_blocks));
  c.Set("dec_blocks", std::to_string(dec_blocks));
  c.Set("dec_width", std::to_string(dec_width));
  c.Set("ffn_width", std::to_string(ffn_width));
  c.Set("dur_width", std::to_string(dur_width));
  c.Set("groups", std::to_string(groups));
  c.Set("codebook_size", std::to_string(codebook_size));
  c.Set("lambda_aux", DoubleString(lambda_aux));
  c.Set("lambda_dur", DoubleString(lambda_dur));
  c.Set("detach_duration", detach_duration ? "true" : "false");
  c.Set("voicing_threshold", DoubleString(voicing_threshold));
  c.Set("seed", std::to_string(seed));
  c.Set("aux.logf0_mean", DoubleString(aux_stats.logf0_mean));
  c.Set("aux.logf0_std", DoubleString(aux_stats.logf0_std));
  c.Set("aux.energy_mean", DoubleString(aux_stats.energy_mean));
  c.Set("aux.energy_std", DoubleString(aux_stats.energy_std));
  c.Set("alphabet", JoinInts(alphabet));
  std::string langs;
  for (std::size_t i = 0; i < languages.size(); ++i) langs += (i ? "," : "") + languages[i];
  c.Set("languages", langs);
  return c;
}

AcousticModel::AcousticModel(AcousticModelConfig config) : config_(std::move(config)) {
  auto &a = config_.alphabet;
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  auto &l = config_.languages;
  std::sort(l.begin(), l.end());
  l.erase(std::unique(l.begin(), l.end()), l.end());
  if (l.empty()) Fail(ErrorCode::kBadConfig, "acoustic model needs at least one language");
  for (std::size_t i = 0; i < a.size(); ++i) char_id_[a[i]] = static_cast<int>(i) + 2;

  const AcousticModelConfig &c = config_;
  store_ = std::make_unique<nn::ParamStore>(c.seed);
  const double emb_std = 1.0 / std::sqrt(static_cast<double>(c.width));
  token_table_ = store_->Normal("token_emb", a.size() + 2, c.width, emb_std);
  lang_table_ = store_->Normal("lang_table", l.size(), c.width, emb_std);
  spk_proj_ = nn::Linear(*store_, "spk_proj", c.spk_dim, c.width, false);
  for (std::size_t b = 0; b < c.enc_blocks; ++b) {
    encoder_.emplace_back(*store_, "enc" + std::to_string(b), c.width, c.heads, c.ffn_width);
  }
  enc_norm_ = nn::LayerNorm(*store_, "enc_ln", c.width);
  dur_conv1_ = nn::Conv1dLayer(*store_, "dur.conv1", c.width, c.dur_width, nn::Conv1dSpec::Same(3));
  dur_conv2_ = nn::Conv1dLayer(*store_, "dur.conv2", c.dur_width, c.dur_width, nn::Conv1dSpec::Same(3));
  dur_out_ = nn::Linear(*store_, "dur.out", c.dur_width, 1);
  dec_in_ = nn::Linear(*store_, "dec.in", c.width, c.dec_width);
  for (std::size_t b = 0; b < c.dec_blocks; ++b) {
    decoder_.emplace_back(*store_, "dec" + std::to_string(b), c.dec_width, c.heads, c.ffn_width);
  }
  dec_norm_ = nn::LayerNorm(*store_, "dec_ln", c.dec_width);
  vq_head_ = nn::Linear(*store_, "vq_head", c.dec_width, c.groups * c.codebook_size);
  aux_head_ = nn::Linear(*store_, "aux_head", c.dec_width, 3);
}

AcousticModelConfig AcousticModel::WithVocabulary(AcousticModelConfig config,
                                                  const std::vector<frontend::TokenSequence> &seqs) {
  std::set<char32_t> chars(config.alphabet.begin(), config.alphabet.end());
  std::set<std::string> langs(config.languages.begin(), config.languages.end());
  for (const auto &s : seqs) {
    langs.insert(s.language_id);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.IsSil(i)) continue;
      for (char32_t cp : DecodeUtf8(s.tokens[i])) chars.insert(cp);
    }
  }
  config.alphabet.assign(chars.begin(), chars.end());
  config.languages.assign(langs.begin(), langs.end());
  return config;
}

void AcousticModel::Save(const fs::path &dir, const nn::Adam *optim, const Config &extra) const {
  Config c = config_.ToConfig();
  c.Merge(extra);
  nn::SaveCheckpoint(dir, c, *store_, optim);
}

AcousticModel AcousticModel::Load(const fs::path &dir, nn::Adam *optim) {
  AcousticModel model(AcousticModelConfig::FromConfig(nn::ReadCheckpointConfig(dir)));
  nn::LoadCheckpointParams(dir, *model.store_, optim);
  return model;
}

std::vector<int> AcousticModel::TokenIds(const frontend::TokenSequence &seq) const {
  std::vector<int> ids;
  ids.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq.IsSil(i)) {
      ids.push_back(kSilId);
      continue;
    }
    const auto cps = DecodeUtf8(seq.tokens[i]);
    auto it = cps.size() == 1 ? char_id_.find(cps[0]) : char_id_.end();
    ids.push_back(it == char_id_.end() ? kUnknownId : it->second);
  }
  return ids;
}

int AcousticModel::LanguageIndex(const std::string &language_id) const {
  const auto &l = config_.languages;
  auto it = std::find(l.begin(), l.end(), language_id);
  if (it == l.end()) Fail(ErrorCode::kUnknownLanguage, language_id);
  return static_cast<int>(it - l.begin());
}

nn::Tensor AcousticModel::ProjectSpeaker(const std::vector<double> &spk) const {
  if (spk.size() != config_.spk_dim) {
    Fail(ErrorCode::kShapeMismatch, "speaker embedding has " + std::to_string(spk.size()) +
                                        " dims, expected " + std::to_string(config_.spk_dim));
  }
  return spk_proj_(nn::Tensor::Constant(1, spk.size(), spk));
}

nn::Tensor AcousticModel::Encode(const std::vector<int> &ids, const std::vector<double> &spk,
                                 int language) const {
  if (ids.empty()) Fail(ErrorCode::kEmptyTokens, "empty token sequence");
  if (language < 0 || static_cast<std::size_t>(language) >= config_.languages.size()) {
    Fail(ErrorCode::kUnknownLanguage, "language index " + std::to_string(language));
  }
  const int n_ids = static_cast<int>(token_table_.rows());
  for (int id : ids) {
    if (id < 0 || id >= n_ids) Fail(ErrorCode::kIndexOutOfRange, "token id " + std::to_string(id));
  }
  nn::Tensor x = nn::Embedding(token_table_, ids);
  x = nn::Add(x, nn::SinusoidalPositions(ids.size(), config_.width));
  for (const auto &block : encoder_) x = block(x);
  x = enc_norm_(x);
  const nn::Tensor cond = nn::Add(ProjectSpeaker(spk), nn::Embedding(lang_table_, {language}));
  return nn::AddRowVector(x, cond);
}

nn::Tensor AcousticModel::PredictLogDurations(const nn::Tensor &hidden) const {
  nn::Tensor h = nn::Transpose(hidden);  // [width x S]
  h = nn::Gelu(dur_conv1_(h));
  h = nn::Gelu(dur_conv2_(h));
  return dur_out_(nn::Transpose(h));
}

std::vector<int> AcousticModel::DurationsFromLog(const std::vector<double> &log_dur,
                                                 const std::vector<int> &ids) {
  if (log_dur.size() != ids.size()) Fail(ErrorCode::kShapeMismatch, "one duration per token");
  std::vector<int> d(ids.size());
  for (std::size_t s = 0; s < ids.size(); ++s) {
    // Clamp before exp so absurd predictions cannot overflow the int cast.
    const double v = std::round(std::exp(std::min(log_dur[s], 20.0)) - 1.0);
    const int lo = ids[s] == kSilId ? 0 : 1;
    d[s] = std::max(lo, static_cast<int>(v));
  }
  return d;
}

nn::Tensor AcousticModel::LengthRegulate(const nn::Tensor &hidden, const std::vector<int> &durations) {
  if (durations.size() != hidden.rows()) {
    Fail(ErrorCode::kShapeMismatch, "one duration per token row");
  }
  long total = 0;
  for (int d : durations) {
    if (d < 0) Fail(ErrorCode::kInvalidArgument, "negative duration");
    total += d;
  }
  if (total == 0) Fail(ErrorCode::kAllZeroDurations, "all durations are zero");
  return nn::RepeatRows(hidden, durations);
}

AcousticModel::Heads AcousticModel::Decode(const nn::Tensor &frames) const {
  const std::size_t t = frames.rows();
  if (t == 0) Fail(ErrorCode::kEmptyInput, "no frames to decode");
  nn::Tensor x = dec_in_(frames);
  x = nn::Add(x, nn::SinusoidalPositions(t, config_.dec_width));
  for (const auto &block : decoder_) x = block(x);
  x = dec_norm_(x);
  Heads h;
  h.vq_logits = nn::Reshape(vq_head_(x), t * config_.groups, config_.codebook_size);
  const nn::Tensor raw = aux_head_(x);
  h.aux = nn::ConcatCols({nn::SliceCols(raw, 0, 2), nn::Sigmoid(nn::SliceCols(raw, 2, 1))});
  return h;
}

void NormalizeAuxTargets(const MatrixD &aux, std::size_t frames, const AuxStats &stats,
                         std::vector<double> &target, std::vector<double> &weight) {
  if (aux.cols() != 3 || aux.rows() < frames) Fail(ErrorCode::kShapeMismatch, "aux must be [T x 3]");
  target.assign(frames * 3, 0.0);
  weight.assign(frames * 3, 1.0);
  for (std::size_t t = 0; t < frames; ++t) {
    const double pitch = aux(t, 0);
    if (pitch > 0) {
      target[3 * t] = (std::log(pitch) - stats.logf0_mean) / stats.logf0_std;
    } else {
      weight[3 * t] = 0.0;
    }
    target[3 * t + 1] = (aux(t, 1) - stats.energy_mean) / stats.energy_std;
    target[3 * t + 2] = aux(t, 2);
  }
}

AcousticLosses AcousticModel::Loss(const std::vector<AcousticItem> &batch) const {
  if (batch.empty()) Fail(ErrorCode::kEmptyInput, "empty batch");
  const std::size_t g = config_.groups;
  const int v = static_cast<int>(config_.codebook_size);
  std::vector<nn::Tensor> ce_terms, aux_terms, dur_terms;
  double n_ce = 0, n_aux = 0, n_dur = 0;
  for (const AcousticItem &item : batch) {
    if (item.token_mask.size() != item.token_ids.size() ||
        item.durations.size() != item.token_ids.size()) {
      Fail(ErrorCode::kShapeMismatch, "token ids, mask and durations differ in length");
    }
    if (item.vq.rows() != item.frame_mask.size() || item.aux.rows() != item.frame_mask.size()) {
      Fail(ErrorCode::kShapeMismatch, "vq, aux and frame mask differ in length");
    }
    if (item.vq.cols() != g || item.aux.cols() != 3) {
      Fail(ErrorCode::kShapeMismatch, "vq must be [T x G] and aux [T x 3]");
    }
    const std::size_t s = PrefixLength(item.token_mask, "token");
    const std::size_t t = PrefixLength(item.frame_mask, "frame");
    if (s == 0) Fail(ErrorCode::kEmptyTokens, "item without tokens");
    const std::vector<int> ids(item.token_ids.begin(), item.token_ids.begin() + s);
    const std::vector<int> dur(item.durations.begin(), item.durations.begin() + s);
    long sum = 0;
    for (int d : dur) sum += d;
    if (sum != static_cast<long>(t)) {
      Fail(ErrorCode::kShapeMismatch, "sum of durations " + std::to_string(sum) +
                                          " != frame count " + std::to_string(t));
    }

    const nn::Tensor hidden = Encode(ids, item.spk, item.language);
    const nn::Tensor log_dur =
        PredictLogDurations(config_.detach_duration ? nn::Detach(hidden) : hidden);
    std::vector<double> dur_target(s);
    for (std::size_t i = 0; i < s; ++i) dur_target[i] = std::log1p(static_cast<double>(dur[i]));
    dur_terms.push_back(nn::WeightedSquaredSum(log_dur, dur_target, std::vector<double>(s, 1.0)));
    n_dur += static_cast<double>(s);

    const Heads heads = Decode(LengthRegulate(hidden, dur));
    std::vector<int> targets(t * g);
    for (std::size_t f = 0; f < t; ++f) {
      for (std::size_t k = 0; k < g; ++k) {
        const int idx = item.vq(f, k);
        if (idx < 0 || idx >= v) Fail(ErrorCode::kIndexOutOfRange, "vq index " + std::to_string(idx));
        targets[f * g + k] = idx;
      }
    }
    ce_terms.push_back(nn::CrossEntropySum(heads.vq_logits, targets, std::vector<double>(t * g, 1.0)));
    n_ce += static_cast<double>(t * g);

    std::vector<double> aux_target, aux_weight;
    NormalizeAuxTargets(item.aux, t, config_.aux_stats, aux_target, aux_weight);
    aux_terms.push_back(nn::WeightedL1Sum(heads.aux, aux_target, aux_weight));
    n_aux += std::accumulate(aux_weight.begin(), aux_weight.end(), 0.0);
  }
  const auto sum_all = [](const std::vector<nn::Tensor> &terms) {
    nn::Tensor acc = terms[0];
    for (std::size_t i = 1; i < terms.size(); ++i) acc = nn::Add(acc, terms[i]);
    return acc;
  };
  const nn::Tensor ce = nn::Scale(sum_all(ce_terms), 1.0 / n_ce);
  const nn::Tensor l1 = nn::Scale(sum_all(aux_terms), 1.0 / n_aux);
  const nn::Tensor mse = nn::Scale(sum_all(dur_terms), 1.0 / n_dur);
  AcousticLosses out;
  out.ce_vq = ce.item();
  out.l1_aux = l1.item();
  out.mse_dur = mse.item();
  out.total = nn::Add(nn::Add(ce, nn::Scale(l1, config_.lambda_aux)),
                      nn::Scale(mse, config_.lambda_dur));
  return out;
}

AcousticInference AcousticModel::Infer(const frontend::TokenSequence &tokens,
                                       const std::vector<double> &spk,
                                       const std::string &language_id) const {
  if (tokens.tokens.empty()) Fail(ErrorCode::kEmptyTokens, "empty token sequence");
  const int lang = LanguageIndex(language_id);
  nn::NoGradGuard guard;
  const std::vector<int> ids = TokenIds(tokens);
  const nn::Tensor hidden = Encode(ids, spk, lang);
  const nn::Tensor log_dur = PredictLogDurations(hidden);
  AcousticInference out;
  out.durations = DurationsFromLog({log_dur.value().begin(), log_dur.value().end()}, ids);
  const Heads heads = Decode(LengthRegulate(hidden, out.durations));
  const std::size_t t = heads.aux.rows(), g = config_.groups, v = config_.codebook_size;
  out.vq = MatrixI(t, g);
  for (std::size_t r = 0; r < t * g; ++r) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < v; ++k) {
      if (heads.vq_logits.at(r, k) > heads.vq_logits.at(r, best)) best = k;
    }
    out.vq.data()[r] = static_cast<int>(best);
  }
  const AuxStats &st = config_.aux_stats;
  out.aux = MatrixD(t, 3);
  for (std::size_t f = 0; f < t; ++f) {
    const double pov = heads.aux.at(f, 2);
    out.aux(f, 0) = pov >= config_.voicing_threshold
                        ? std::exp(heads.aux.at(f, 0) * st.logf0_std + st.logf0_mean)
                        : 0.0;
    out.aux(f, 1) = heads.aux.at(f, 1) * st.energy_std + st.energy_mean;
    out.aux(f, 2) = pov;
  }
  return out;
}

namespace {

// Item indices of step `step`: a window over the concatenation of
// per-epoch permutations, so a resumed run sees the same batches.
std::vector<std::size_t> BatchIndices(std::size_t n, std::size_t batch, std::int64_t step,
                                      std::uint64_t seed) {
  std::vector<std::size_t> out;
  std::size_t pos = static_cast<std::size_t>(step) * batch;
  std::size_t epoch = static_cast<std::size_t>(-1);
  std::vector<std::size_t> perm(n);
  for (std::size_t k = 0; k < batch; ++k, ++pos) {
    if (pos / n != epoch) {
      epoch = pos / n;
      std::iota(perm.begin(), perm.end(), 0);
      std::mt19937_64 rng(seed * 1000003u + epoch);
      std::shuffle(perm.begin(), perm.end(), rng);
    }
    out.push_back(perm[pos % n]);
  }
  return out;
}

std::vector<AcousticItem> Gather(const std::vector<AcousticItem> &data,
                                 const std::vector<std::size_t> &idx) {
  std::vector<AcousticItem> b;
  b.reserve(idx.size());
  for (std::size_t i : idx) b.push_back(data[i]);
  return b;
}

}  // namespace

AcousticTrainResult TrainAcousticModel(AcousticModel &model, const std::vector<AcousticItem> &data,
                                       const AcousticTrainOptions &opts) {
  if (data.empty()) Fail(ErrorCode::kInsufficientData, "no training items");
  if (opts.batch_size == 0 || opts.max_steps < 0) {
    Fail(ErrorCode::kBadConfig, "batch_size must be positive and max_steps non-negative");
  }
  const std::size_t batch = std::min(opts.batch_size, data.size());
  nn::Adam adam(model.params(), opts.adam);
  if (opts.resume && !opts.ckpt_root.empty()) {
    const fs::path last = nn::LatestCheckpoint(opts.ckpt_root);
    if (!last.empty()) nn::LoadCheckpointParams(last, model.params(), &adam);
  }
  const std::int64_t start = adam.steps();
  const std::vector<AcousticItem> probe = Gather(data, BatchIndices(data.size(), batch, start, opts.seed));

  AcousticTrainResult result;
  {
    nn::NoGradGuard guard;
    result.initial_loss = model.Loss(probe).total.item();
  }
  const auto save = [&] {
    if (opts.ckpt_root.empty()) return;
    model.Save(opts.ckpt_root / ("step" + std::to_string(adam.steps())), &adam);
  };
  for (std::int64_t step = start; step < opts.max_steps; ++step) {
    const auto items = Gather(data, BatchIndices(data.size(), batch, step, opts.seed));
    model.params().ZeroGrad();
    const AcousticLosses l = model.Loss(items);
    nn::Backward(l.total);
    const double grad_norm = adam.Step();
    result.losses.push_back(l.total.item());
    LogLine("train-am")
        .kv("step", adam.steps())
        .kv("loss", l.total.item())
        .kv("ce", l.ce_vq)
        .kv("aux", l.l1_aux)
        .kv("dur", l.mse_dur)
        .kv("grad_norm", grad_norm);
    if (opts.save_every > 0 && adam.steps() % opts.save_every == 0) save();
  }
  {
    nn::NoGradGuard guard;
    result.final_loss = model.Loss(probe).total.item();
  }
  result.steps = adam.steps();
  const bool saved_last = opts.save_every > 0 && result.steps % opts.save_every == 0;
  if (result.steps > start && !saved_last) save();
  return result;
}

}  // namespace vqtts::txt2vec
