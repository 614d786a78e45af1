// src/vec2wav/vocoder.cc

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

#include "vqtts/vec2wav/vocoder.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "vqtts/base/error.h"
#include "vqtts/base/log.h"
#include "vqtts/base/text.h"
#include "vqtts/dsp/mel.h"
#include "vqtts/nn/ops.h"

namespace vqtts::vec2wav {
namespace fs = std::filesystem;

namespace {

constexpr double kSlope = 0.1;

std::string DoubleString(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string JoinSizes(const std::vector<std::size_t> &v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<std::size_t> SizeList(const Config &c, const std::string &key,
                                  const std::vector<std::size_t> &def) {
  if (!c.Has(key)) return def;
  std::vector<std::size_t> out;
  for (std::int64_t v : c.GetIntList(key, {})) {
    if (v <= 0) Fail(ErrorCode::kBadConfig, key + " entries must be positive");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

nn::Conv1dSpec Strided(std::size_t kernel, std::size_t stride) {
  nn::Conv1dSpec s;
  s.kernel = kernel;
  s.stride = stride;
  s.pad_left = kernel / 2;
  s.pad_right = kernel / 2;
  return s;
}

}  // namespace

VocoderConfig VocoderConfig::FromConfig(const Config &c) {
  VocoderConfig v;
  v.groups = c.GetInt("groups", v.groups);
  v.codebook_size = c.GetInt("codebook_size", v.codebook_size);
  v.code_dim = c.GetInt("code_dim", v.code_dim);
  v.aux_dim = c.GetInt("aux_dim", v.aux_dim);
  v.enc_width = c.GetInt("enc_width", v.enc_width);
  v.enc_blocks = c.GetInt("enc_blocks", v.enc_blocks);
  v.enc_kernel = c.GetInt("enc_kernel", v.enc_kernel);
  v.gen_channels = c.GetInt("gen_channels", v.gen_channels);
  v.upsample_rates = SizeList(c, "upsample_rates", v.upsample_rates);
  v.hop = c.GetInt("hop", v.hop);
  v.spk_dim = c.GetInt("spk_dim", v.spk_dim);
  v.sample_rate = static_cast<int>(c.GetInt("sample_rate", v.sample_rate));
  v.aux_stats.logf0_mean = c.GetDouble("aux.logf0_mean", v.aux_stats.logf0_mean);
  v.aux_stats.logf0_std = c.GetDouble("aux.logf0_std", v.aux_stats.logf0_std);
  v.aux_stats.energy_mean = c.GetDouble("aux.energy_mean", v.aux_stats.energy_mean);
  v.aux_stats.energy_std = c.GetDouble("aux.energy_std", v.aux_stats.energy_std);
  const std::string mode = c.GetString("mode", "lite");
  if (mode == "lite") {
    v.mode = TrainMode::kLite;
  } else if (mode == "adversarial") {
    v.mode = TrainMode::kAdversarial;
  } else {
    Fail(ErrorCode::kBadConfig, "vocoder mode must be lite or adversarial, got " + mode);
  }
  v.segment_frames = c.GetInt("segment_frames", v.segment_frames);
  v.loss_n_fft = c.GetInt("loss_n_fft", v.loss_n_fft);
  v.loss_win = c.GetInt("loss_win", v.loss_win);
  v.loss_hop = c.GetInt("loss_hop", v.loss_hop);
  v.loss_n_mels = c.GetInt("loss_n_mels", v.loss_n_mels);
  v.periods = SizeList(c, "periods", v.periods);
  v.scales = c.GetInt("scales", v.scales);
  v.disc_channels = c.GetInt("disc_channels", v.disc_channels);
  v.lambda_mel = c.GetDouble("lambda_mel", v.lambda_mel);
  v.lambda_adv = c.GetDouble("lambda_adv", v.lambda_adv);
  v.lambda_fm = c.GetDouble("lambda_fm", v.lambda_fm);
  v.seed = c.GetInt("seed", static_cast<std::int64_t>(v.seed));

  const std::size_t product = std::accumulate(v.upsample_rates.begin(), v.upsample_rates.end(),
                                              std::size_t{1}, std::multiplies<>());
  if (v.upsample_rates.empty() || product != v.hop) {
    Fail(ErrorCode::kBadConfig, "upsample rates multiply to " + std::to_string(product) +
                                    ", hop is " + std::to_string(v.hop));
  }
  if (v.groups == 0 || v.codebook_size == 0 || v.code_dim == 0 || v.aux_dim == 0 ||
      v.enc_width == 0 || v.enc_kernel % 2 == 0 || v.gen_channels == 0 || v.spk_dim == 0 ||
      v.disc_channels == 0 || v.segment_frames == 0 || v.sample_rate <= 0) {
    Fail(ErrorCode::kBadConfig, "vocoder widths must be positive and enc_kernel odd");
  }
  if (v.loss_win > v.loss_n_fft || v.loss_hop == 0 || v.loss_n_mels == 0) {
    Fail(ErrorCode::kBadConfig, "vocoder mel-loss analysis settings");
  }
  if (v.aux_stats.logf0_std <= 0 || v.aux_stats.energy_std <= 0) {
    Fail(ErrorCode::kBadConfig, "vocoder aux stds must be positive");
  }
  return v;
}

Config VocoderConfig::ToConfig() const {
  Config c;
  c.Set("groups", std::to_string(groups));
  c.Set("codebook_size", std::to_string(codebook_size));
  c.Set("code_dim", std::to_string(code_dim));
  c.Set("aux_dim", std::to_string(aux_dim));
  c.Set("enc_width", std::to_string(enc_width));
  c.Set("enc_blocks", std::to_string(enc_blocks));
  c.Set("enc_kernel", std::to_string(enc_kernel));
  c.Set("gen_channels", std::to_string(gen_channels));
  c.Set("upsample_rates", JoinSizes(upsample_rates));
  c.Set("hop", std::to_string(hop));
  c.Set("spk_dim", std::to_string(spk_dim));
  c.Set("sample_rate", std::to_string(sample_rate));
  c.Set("aux.logf0_mean", DoubleString(aux_stats.logf0_mean));
  c.Set("aux.logf0_std", DoubleString(aux_stats.logf0_std));
  c.Set("aux.energy_mean", DoubleString(aux_stats.energy_mean));
  c.Set("aux.energy_std", DoubleString(aux_stats.energy_std));
  c.Set("mode", mode == TrainMode::kLite ? "lite" : "adversarial");
  c.Set("segment_frames", std::to_string(segment_frames));
  c.Set("loss_n_fft", std::to_string(loss_n_fft));
  c.Set("loss_win", std::to_string(loss_win));
  c.Set("loss_hop", std::to_string(loss_hop));
  c.Set("loss_n_mels", std::to_string(loss_n_mels));
  c.Set("periods", JoinSizes(periods));
  c.Set("scales", std::to_string(scales));
  c.Set("disc_channels", std::to_string(disc_channels));
  c.Set("lambda_mel", DoubleString(lambda_mel));
  c.Set("lambda_adv", DoubleString(lambda_adv));
  c.Set("lambda_fm", DoubleString(lambda_fm));
  c.Set("seed", std::to_string(seed));
  return c;
}

std::vector<double> TrimReference(const std::vector<double> &wave, std::size_t frames,
                                  std::size_t hop) {
  const std::size_t want = frames * hop;
  if (wave.size() < want || wave.size() >= want + hop) {
    Fail(ErrorCode::kLengthMismatch, "reference has " + std::to_string(wave.size()) +
                                         " samples, expected " + std::to_string(want));
  }
  return {wave.begin(), wave.begin() + static_cast<std::ptrdiff_t>(want)};
}

MelLoss::MelLoss(const VocoderConfig &c)
    : n_fft_(c.loss_n_fft), win_(c.loss_win), hop_(c.loss_hop) {
  dsp::MelOptions m;
  m.sample_rate = c.sample_rate;
  m.hop = c.loss_hop;
  m.win = c.loss_win;
  m.n_fft = c.loss_n_fft;
  m.n_mels = c.loss_n_mels;
  floor_ = m.log_floor;
  const MatrixD fb = dsp::MelFilterbank(m);
  filterbank_ = nn::Tensor::Constant(fb.rows(), fb.cols(), fb.data());
}

nn::Tensor MelLoss::LogMel(const nn::Tensor &wave) const {
  const nn::Tensor mag = nn::StftMagnitude(wave, n_fft_, hop_, win_);
  return nn::LogClamped(nn::MatMul(mag, filterbank_), floor_);
}

nn::Tensor MelLoss::operator()(const nn::Tensor &generated,
                               const std::vector<double> &reference) const {
  if (generated.rows() != 1 || generated.cols() != reference.size()) {
    Fail(ErrorCode::kLengthMismatch, "generated " + std::to_string(generated.cols()) +
                                         " samples vs reference " +
                                         std::to_string(reference.size()));
  }
  nn::Tensor ref;
  {
    nn::NoGradGuard guard;
    ref = LogMel(nn::Tensor::Constant(1, reference.size(), reference));
  }
  const nn::Tensor gen = LogMel(generated);
  const std::vector<double> target(ref.value().begin(), ref.value().end());
  return nn::WeightedL1Sum(gen, target,
                           std::vector<double>(target.size(), 1.0 / static_cast<double>(target.size())));
}

Discriminators::Discriminators(nn::ParamStore &store, const VocoderConfig &c)
    : periods_(c.periods) {
  const std::size_t ch = c.disc_channels;
  for (std::size_t p : periods_) {
    const std::string n = "mpd" + std::to_string(p);
    Stack s;
    s.layers.emplace_back(store, n + ".0", 1, ch, nn::Conv1dSpec::Same(5, 1));
    s.layers.emplace_back(store, n + ".1", ch, 2 * ch, nn::Conv1dSpec::Same(5, 2));
    s.layers.emplace_back(store, n + ".2", 2 * ch, 2 * ch, nn::Conv1dSpec::Same(5, 4));
    s.layers.emplace_back(store, n + ".out", 2 * ch, 1, nn::Conv1dSpec::Same(3, 1));
    mpd_.push_back(std::move(s));
  }
  for (std::size_t k = 0; k < c.scales; ++k) {
    const std::string n = "msd" + std::to_string(k);
    Stack s;
    s.layers.emplace_back(store, n + ".0", 1, ch, nn::Conv1dSpec::Same(15, 1));
    s.layers.emplace_back(store, n + ".1", ch, 2 * ch, Strided(9, 4));
    s.layers.emplace_back(store, n + ".2", 2 * ch, 2 * ch, Strided(9, 4));
    s.layers.emplace_back(store, n + ".out", 2 * ch, 1, nn::Conv1dSpec::Same(3, 1));
    msd_.push_back(std::move(s));
  }
}

DiscOutput Discriminators::Run(const Stack &s, const nn::Tensor &x) const {
  DiscOutput out;
  nn::Tensor h = x;
  for (std::size_t i = 0; i + 1 < s.layers.size(); ++i) {
    h = nn::LeakyRelu(s.layers[i](h), kSlope);
    out.features.push_back(h);
  }
  out.score = s.layers.back()(h);
  return out;
}

std::vector<DiscOutput> Discriminators::operator()(const nn::Tensor &wave) const {
  std::vector<DiscOutput> outs;
  const std::size_t n = wave.cols();
  for (std::size_t i = 0; i < periods_.size(); ++i) {
    const std::size_t p = periods_[i];
    const std::size_t len = (n + p - 1) / p;
    nn::Tensor x = wave;
    if (len * p > n) x = nn::ConcatCols({wave, nn::Tensor::Zeros(1, len * p - n)});
    // Fold to [p x len]; row j is every p-th sample starting at j.
    const nn::Tensor folded = nn::Transpose(nn::Reshape(x, len, p));
    DiscOutput merged;
    std::vector<nn::Tensor> scores;
    for (std::size_t j = 0; j < p; ++j) {
      DiscOutput o = Run(mpd_[i], nn::SliceRows(folded, j, 1));
      scores.push_back(o.score);
      for (auto &f : o.features) merged.features.push_back(std::move(f));
    }
    merged.score = nn::ConcatCols(scores);
    outs.push_back(std::move(merged));
  }
  nn::Tensor x = wave;
  for (std::size_t k = 0; k < msd_.size(); ++k) {
    if (k > 0) x = nn::AvgPool1d(x, 4, 2, 1);
    outs.push_back(Run(msd_[k], x));
  }
  return outs;
}

Vocoder::Vocoder(VocoderConfig config) : config_(std::move(config)), mel_(config_) {
  const VocoderConfig &c = config_;
  gen_store_ = std::make_unique<nn::ParamStore>(c.seed);
  disc_store_ = std::make_unique<nn::ParamStore>(c.seed + 1);
  const double emb_std = 1.0 / std::sqrt(static_cast<double>(c.code_dim));
  for (std::size_t g = 0; g < c.groups; ++g) {
    code_tables_.push_back(
        gen_store_->Normal("code_emb" + std::to_string(g), c.codebook_size, c.code_dim, emb_std));
  }
  aux_proj_ = nn::Linear(*gen_store_, "aux_proj", 3, c.aux_dim);
  enc_in_ = nn::Conv1dLayer(*gen_store_, "enc.in", c.input_width(), c.enc_width,
                            nn::Conv1dSpec::Same(c.enc_kernel));
  for (std::size_t b = 0; b < c.enc_blocks; ++b) {
    const std::string n = "enc.block" + std::to_string(b);
    enc_blocks_.emplace_back(
        nn::Conv1dLayer(*gen_store_, n + ".a", c.enc_width, c.enc_width,
                        nn::Conv1dSpec::Same(c.enc_kernel)),
        nn::Conv1dLayer(*gen_store_, n + ".b", c.enc_width, c.enc_width,
                        nn::Conv1dSpec::Same(c.enc_kernel)));
  }
  spk_proj_ = nn::Linear(*gen_store_, "spk_proj", c.spk_dim, c.enc_width, false);
  gen_pre_ = nn::Conv1dLayer(*gen_store_, "gen.pre", c.enc_width, c.gen_channels,
                             nn::Conv1dSpec::Same(7));
  std::size_t ch = c.gen_channels;
  for (std::size_t i = 0; i < c.upsample_rates.size(); ++i) {
    const std::size_t r = c.upsample_rates[i];
    const std::size_t out = std::max<std::size_t>(ch / 2, 8);
    const std::string n = "gen.up" + std::to_string(i);
    stages_.push_back({r, nn::Conv1dLayer(*gen_store_, n + ".conv", ch, out, nn::Conv1dSpec::Same(2 * r + 1)),
                       nn::Conv1dLayer(*gen_store_, n + ".res1", out, out, nn::Conv1dSpec::Same(3, 1)),
                       nn::Conv1dLayer(*gen_store_, n + ".res2", out, out, nn::Conv1dSpec::Same(3, 3))});
    ch = out;
  }
  gen_post_ = nn::Conv1dLayer(*gen_store_, "gen.post", ch, 1, nn::Conv1dSpec::Same(7));
  disc_ = std::make_unique<Discriminators>(*disc_store_, c);
}

void Vocoder::Save(const fs::path &dir, const nn::Adam *gen_optim,
                   const nn::Adam *disc_optim) const {
  const Config cfg = config_.ToConfig();
  nn::SaveCheckpoint(dir, cfg, *gen_store_, gen_optim);
  if (config_.mode == TrainMode::kAdversarial) {
    nn::SaveCheckpoint(dir / "disc", cfg, *disc_store_, disc_optim);
  }
}

Vocoder Vocoder::Load(const fs::path &dir, nn::Adam *gen_optim, nn::Adam *disc_optim) {
  Vocoder v(VocoderConfig::FromConfig(nn::ReadCheckpointConfig(dir)));
  nn::LoadCheckpointParams(dir, *v.gen_store_, gen_optim);
  if (fs::exists(dir / "disc" / "params.bin")) {
    nn::LoadCheckpointParams(dir / "disc", *v.disc_store_, disc_optim);
  }
  return v;
}

nn::Tensor Vocoder::EmbedCodes(const MatrixI &vq, const MatrixD &aux) const {
  const std::size_t t = vq.rows();
  if (t == 0) Fail(ErrorCode::kEmptyInput, "no frames");
  if (vq.cols() != config_.groups) {
    Fail(ErrorCode::kShapeMismatch, "vq has " + std::to_string(vq.cols()) + " groups, expected " +
                                        std::to_string(config_.groups));
  }
  if (aux.rows() != t || aux.cols() != 3) {
    Fail(ErrorCode::kLengthMismatch, "aux must be [T x 3] with the vq frame count");
  }
  std::vector<nn::Tensor> parts;
  for (std::size_t g = 0; g < config_.groups; ++g) {
    std::vector<int> ids(t);
    for (std::size_t f = 0; f < t; ++f) {
      const int v = vq(f, g);
      if (v < 0 || static_cast<std::size_t>(v) >= config_.codebook_size) {
        Fail(ErrorCode::kIndexOutOfRange, "code " + std::to_string(v) + " at frame " +
                                              std::to_string(f));
      }
      ids[f] = v;
    }
    parts.push_back(nn::Embedding(code_tables_[g], ids));
  }
  const MatrixD norm = features::NormalizeAux(aux, config_.aux_stats);
  parts.push_back(aux_proj_(nn::Tensor::Constant(t, 3, norm.data())));
  return nn::ConcatCols(parts);
}

nn::Tensor Vocoder::Encode(const MatrixI &vq, const MatrixD &aux,
                           const std::vector<double> &spk) const {
  if (spk.size() != config_.spk_dim) {
    Fail(ErrorCode::kShapeMismatch, "speaker embedding has " + std::to_string(spk.size()) +
                                        " dims, expected " + std::to_string(config_.spk_dim));
  }
  nn::Tensor x = enc_in_(nn::Transpose(EmbedCodes(vq, aux)));
  for (const auto &[a, b] : enc_blocks_) {
    x = nn::Add(x, b(nn::LeakyRelu(a(nn::LeakyRelu(x, kSlope)), kSlope)));
  }
  const nn::Tensor s = spk_proj_(nn::Tensor::Constant(1, spk.size(), spk));
  return nn::AddColVector(x, nn::Transpose(s));
}

nn::Tensor Vocoder::GenerateTensor(const MatrixI &vq, const MatrixD &aux,
                                   const std::vector<double> &spk) const {
  nn::Tensor x = gen_pre_(Encode(vq, aux, spk));
  for (const UpStage &st : stages_) {
    x = st.up(nn::UpsampleNearest(nn::LeakyRelu(x, kSlope), st.rate));
    x = nn::Add(x, st.res2(nn::LeakyRelu(st.res1(nn::LeakyRelu(x, kSlope)), kSlope)));
  }
  return nn::Tanh(gen_post_(nn::LeakyRelu(x, kSlope)));
}

std::vector<double> Vocoder::Generate(const MatrixI &vq, const MatrixD &aux,
                                      const std::vector<double> &spk) const {
  nn::NoGradGuard guard;
  const nn::Tensor w = GenerateTensor(vq, aux, spk);
  return {w.value().begin(), w.value().end()};
}

nn::Tensor Vocoder::LiteLoss(const std::vector<VocoderItem> &batch) const {
  if (batch.empty()) Fail(ErrorCode::kEmptyInput, "empty batch");
  nn::Tensor total;
  for (const VocoderItem &item : batch) {
    const auto ref = TrimReference(item.wave, item.vq.rows(), config_.hop);
    const nn::Tensor l = mel_(GenerateTensor(item.vq, item.aux, item.spk), ref);
    total = total.defined() ? nn::Add(total, l) : l;
  }
  return nn::Scale(total, 1.0 / static_cast<double>(batch.size()));
}

VocoderItem CropSegment(const VocoderItem &item, std::size_t segment_frames, std::size_t hop,
                        std::uint64_t seed) {
  const std::size_t t = item.vq.rows();
  if (t <= segment_frames) return item;
  std::mt19937_64 rng(seed);
  const std::size_t start = std::uniform_int_distribution<std::size_t>(0, t - segment_frames)(rng);
  VocoderItem out;
  out.spk = item.spk;
  out.vq = MatrixI(segment_frames, item.vq.cols());
  out.aux = MatrixD(segment_frames, item.aux.cols());
  for (std::size_t f = 0; f < segment_frames; ++f) {
    std::copy(item.vq.row(start + f).begin(), item.vq.row(start + f).end(), out.vq.row(f).begin());
    std::copy(item.aux.row(start + f).begin(), item.aux.row(start + f).end(),
              out.aux.row(f).begin());
  }
  const std::size_t s0 = start * hop, n = segment_frames * hop;
  if (item.wave.size() < s0 + n) {
    Fail(ErrorCode::kLengthMismatch, "reference shorter than its frames");
  }
  out.wave.assign(item.wave.begin() + static_cast<std::ptrdiff_t>(s0),
                  item.wave.begin() + static_cast<std::ptrdiff_t>(s0 + n));
  return out;
}

namespace {

std::vector<VocoderItem> StepBatch(const std::vector<VocoderItem> &data, std::size_t batch,
                                   std::int64_t step, const VocoderConfig &c, std::uint64_t seed) {
  const std::size_t n = data.size();
  std::vector<VocoderItem> out;
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
    const std::uint64_t crop_seed = seed ^ (0x9E3779B97F4A7C15ull * (pos + 1));
    out.push_back(CropSegment(data[perm[pos % n]], c.segment_frames, c.hop, crop_seed));
  }
  return out;
}

nn::Tensor SumTensors(const std::vector<nn::Tensor> &terms) {
  nn::Tensor acc = terms.at(0);
  for (std::size_t i = 1; i < terms.size(); ++i) acc = nn::Add(acc, terms[i]);
  return acc;
}

}  // namespace

VocoderTrainResult TrainVocoder(Vocoder &voc, const std::vector<VocoderItem> &data,
                                const VocoderTrainOptions &opts) {
  if (data.empty()) Fail(ErrorCode::kInsufficientData, "no vocoder training items");
  if (opts.batch_size == 0 || opts.max_steps < 0) {
    Fail(ErrorCode::kBadConfig, "batch_size must be positive and max_steps non-negative");
  }
  const VocoderConfig &c = voc.config();
  for (const VocoderItem &item : data) TrimReference(item.wave, item.vq.rows(), c.hop);
  const bool adversarial = c.mode == TrainMode::kAdversarial;
  const std::size_t batch = std::min(opts.batch_size, data.size());
  nn::Adam gen_adam(voc.gen_params(), opts.adam);
  nn::Adam disc_adam(voc.disc_params(), opts.adam);
  if (opts.resume && !opts.ckpt_root.empty()) {
    const fs::path last = nn::LatestCheckpoint(opts.ckpt_root);
    if (!last.empty()) {
      nn::LoadCheckpointParams(last, voc.gen_params(), &gen_adam);
      if (adversarial && fs::exists(last / "disc" / "params.bin")) {
        nn::LoadCheckpointParams(last / "disc", voc.disc_params(), &disc_adam);
      }
    }
  }
  const std::int64_t start = gen_adam.steps();
  const auto probe = StepBatch(data, batch, start, c, opts.seed);
  VocoderTrainResult result;
  {
    nn::NoGradGuard guard;
    result.initial_mel = voc.LiteLoss(probe).item();
  }
  const auto save = [&] {
    if (opts.ckpt_root.empty()) return;
    voc.Save(opts.ckpt_root / ("step" + std::to_string(gen_adam.steps())), &gen_adam,
             adversarial ? &disc_adam : nullptr);
  };

  const MelLoss &mel = voc.mel_loss();
  const Discriminators &disc = voc.discriminators();
  const double inv = 1.0 / static_cast<double>(batch);
  for (std::int64_t step = start; step < opts.max_steps; ++step) {
    const auto items = StepBatch(data, batch, step, c, opts.seed);
    if (!adversarial) {
      voc.gen_params().ZeroGrad();
      const nn::Tensor loss = voc.LiteLoss(items);
      nn::Backward(loss);
      gen_adam.Step();
      result.mel_losses.push_back(loss.item());
      LogLine("train-voc").kv("step", gen_adam.steps()).kv("mel", loss.item());
    } else {
      std::vector<nn::Tensor> fakes;
      std::vector<std::vector<double>> refs;
      for (const VocoderItem &item : items) {
        fakes.push_back(voc.GenerateTensor(item.vq, item.aux, item.spk));
        refs.push_back(TrimReference(item.wave, item.vq.rows(), c.hop));
      }
      // Discriminator update on detached fakes.
      std::vector<nn::Tensor> d_terms;
      for (std::size_t k = 0; k < items.size(); ++k) {
        const nn::Tensor real = nn::Tensor::Constant(1, refs[k].size(), refs[k]);
        const auto dr = disc(real);
        const auto df = disc(nn::Detach(fakes[k]));
        for (std::size_t j = 0; j < dr.size(); ++j) {
          d_terms.push_back(nn::Mean(nn::Square(nn::AddScalar(dr[j].score, -1.0))));
          d_terms.push_back(nn::Mean(nn::Square(df[j].score)));
        }
      }
      voc.disc_params().ZeroGrad();
      const nn::Tensor d_loss = nn::Scale(SumTensors(d_terms), inv);
      nn::Backward(d_loss);
      disc_adam.Step();

      // Generator update: mel + least-squares adversarial + feature matching
      // against the updated discriminators.
      std::vector<nn::Tensor> mel_terms, adv_terms, fm_terms;
      for (std::size_t k = 0; k < items.size(); ++k) {
        std::vector<DiscOutput> dr;
        {
          nn::NoGradGuard guard;
          dr = disc(nn::Tensor::Constant(1, refs[k].size(), refs[k]));
        }
        const auto df = disc(fakes[k]);
        mel_terms.push_back(mel(fakes[k], refs[k]));
        for (std::size_t j = 0; j < df.size(); ++j) {
          adv_terms.push_back(nn::Mean(nn::Square(nn::AddScalar(df[j].score, -1.0))));
          for (std::size_t f = 0; f < df[j].features.size(); ++f) {
            const auto rv = dr[j].features[f].value();
            const std::vector<double> target(rv.begin(), rv.end());
            fm_terms.push_back(nn::WeightedL1Sum(
                df[j].features[f], target,
                std::vector<double>(target.size(), 1.0 / static_cast<double>(target.size()))));
          }
        }
      }
      const nn::Tensor mel_l = nn::Scale(SumTensors(mel_terms), inv);
      const nn::Tensor adv_l = nn::Scale(SumTensors(adv_terms), inv);
      const nn::Tensor fm_l = nn::Scale(SumTensors(fm_terms), inv);
      const nn::Tensor g_loss = nn::Add(nn::Add(nn::Scale(mel_l, c.lambda_mel),
                                                nn::Scale(adv_l, c.lambda_adv)),
                                        nn::Scale(fm_l, c.lambda_fm));
      voc.gen_params().ZeroGrad();
      nn::Backward(g_loss);
      gen_adam.Step();
      result.mel_losses.push_back(mel_l.item());
      result.last_disc_loss = d_loss.item();
      result.last_adv_loss = adv_l.item();
      result.last_fm_loss = fm_l.item();
      LogLine("train-voc")
          .kv("step", gen_adam.steps())
          .kv("mel", mel_l.item())
          .kv("adv", adv_l.item())
          .kv("fm", fm_l.item())
          .kv("disc", d_loss.item());
    }
    if (opts.save_every > 0 && gen_adam.steps() % opts.save_every == 0) save();
  }
  {
    nn::NoGradGuard guard;
    result.final_mel = voc.LiteLoss(probe).item();
  }
  result.steps = gen_adam.steps();
  const bool saved_last = opts.save_every > 0 && result.steps % opts.save_every == 0;
  if (result.steps > start && !saved_last) save();
  return result;
}

}  // namespace vqtts::vec2wav
