// tests/vec2wav_test.cc

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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>

#include "doctest.h"
#include "toy_voc.h"
#include "vqtts/base/error.h"
#include "vqtts/nn/ops.h"
#include "vqtts/vec2wav/vocoder.h"

using namespace vqtts;
using namespace vqtts::vec2wav;
namespace fs = std::filesystem;

namespace {

ErrorCode CodeOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("config validation and round trip") {
  const auto c = testing::ToyVocConfig();
  const auto back = VocoderConfig::FromConfig(c.ToConfig());
  CHECK(back.upsample_rates == c.upsample_rates);
  CHECK(back.hop == 40);
  CHECK(back.periods == c.periods);
  CHECK(back.mode == TrainMode::kLite);
  Config bad = c.ToConfig();
  bad.Set("hop", "41");
  CHECK(CodeOf([&] { VocoderConfig::FromConfig(bad); }) == ErrorCode::kBadConfig);
  bad = c.ToConfig();
  bad.Set("mode", "gan");
  CHECK(CodeOf([&] { VocoderConfig::FromConfig(bad); }) == ErrorCode::kBadConfig);
  // Defaults: 16 kHz, 10 ms hop, rates 5*4*4*2.
  const auto def = VocoderConfig::FromConfig(Config{});
  CHECK(def.hop == 160);
  CHECK(def.upsample_rates == std::vector<std::size_t>{5, 4, 4, 2});
}

TEST_CASE("embed codes") {
  Vocoder v(testing::ToyVocConfig());
  MatrixI vq(10, 2, 3);
  vq(4, 0) = 5;
  MatrixD aux(10, 3, 0.0);
  for (std::size_t t = 0; t < 10; ++t) aux(t, 0) = 180.0, aux(t, 2) = 0.8;
  const nn::Tensor e = v.EmbedCodes(vq, aux);
  CHECK(e.rows() == 10);
  CHECK(e.cols() == 2 * 8 + 4);
  for (std::size_t c = 0; c < e.cols(); ++c) {
    CHECK(e.at(1, c) == e.at(7, c));
  }
  bool differs = false;
  for (std::size_t c = 0; c < e.cols(); ++c) differs |= e.at(4, c) != e.at(1, c);
  CHECK(differs);
  MatrixI bad = vq;
  bad(2, 1) = 8;
  CHECK(CodeOf([&] { v.EmbedCodes(bad, aux); }) == ErrorCode::kIndexOutOfRange);
  bad(2, 1) = -1;
  CHECK(CodeOf([&] { v.EmbedCodes(bad, aux); }) == ErrorCode::kIndexOutOfRange);
  CHECK(CodeOf([&] { v.EmbedCodes(MatrixI(0, 2), MatrixD(0, 3)); }) == ErrorCode::kEmptyInput);
  CHECK(CodeOf([&] { v.EmbedCodes(vq, MatrixD(9, 3)); }) == ErrorCode::kLengthMismatch);
  CHECK(CodeOf([&] { v.EmbedCodes(MatrixI(10, 3), aux); }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("generate: length, range, conditioning, determinism, purity") {
  Vocoder v(testing::ToyVocConfig());
  const auto items = testing::ToyVocItems(v.config(), 1, 2, 20);
  const auto &it = items[0];
  const MatrixI vq_copy = it.vq;
  const MatrixD aux_copy = it.aux;
  const auto w = v.Generate(it.vq, it.aux, it.spk);
  CHECK(w.size() == 20 * 40);
  for (double x : w) {
    CHECK(std::isfinite(x));
    CHECK(std::abs(x) <= 1.0);
  }
  CHECK(v.Generate(it.vq, it.aux, it.spk) == w);
  std::vector<double> other = it.spk;
  other[0] += 0.5;
  const auto w2 = v.Generate(it.vq, it.aux, other);
  double diff = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) diff = std::max(diff, std::abs(w[i] - w2[i]));
  CHECK(diff > 0.0);
  CHECK(it.vq == vq_copy);
  CHECK(it.aux == aux_copy);
  CHECK(CodeOf([&] { v.Generate(it.vq, it.aux, {1.0}); }) == ErrorCode::kShapeMismatch);

  // Default configuration: 20 frames -> 3200 samples.
  VocoderConfig def;
  def.codebook_size = 16;
  def.code_dim = 4;
  def.aux_dim = 4;
  def.enc_width = 8;
  def.enc_blocks = 1;
  def.gen_channels = 16;
  def.spk_dim = 4;
  def.scales = 1;
  def.periods = {2};
  Vocoder d(def);
  CHECK(d.Generate(MatrixI(20, 2, 1), MatrixD(20, 3, 0.0), std::vector<double>(4, 0.1)).size() ==
        3200);
}

TEST_CASE("speaker vector is added to every encoder frame") {
  Vocoder v(testing::ToyVocConfig());
  const auto it = testing::ToyVocItems(v.config(), 1, 4, 12)[0];
  const nn::Tensor a = v.Encode(it.vq, it.aux, it.spk);
  const nn::Tensor b = v.Encode(it.vq, it.aux, std::vector<double>(4, 0.0));
  CHECK(a.rows() == 16);
  CHECK(a.cols() == 12);
  for (std::size_t c = 0; c < a.rows(); ++c) {
    const double d0 = a.at(c, 0) - b.at(c, 0);
    for (std::size_t t = 1; t < a.cols(); ++t) {
      CHECK(a.at(c, t) - b.at(c, t) == doctest::Approx(d0).epsilon(1e-12));
    }
  }
}

TEST_CASE("mel loss") {
  const auto c = testing::ToyVocConfig();
  MelLoss mel(c);
  const auto it = testing::ToyVocItems(c, 1, 5)[0];
  const nn::Tensor same = nn::Tensor::Constant(1, it.wave.size(), it.wave);
  CHECK(mel(same, it.wave).item() == 0.0);
  std::vector<double> louder = it.wave;
  for (double &x : louder) x *= 2.0;
  // A gain of 2 shifts every unfloored log-mel bin by ln 2.
  const double l = mel(nn::Tensor::Constant(1, louder.size(), louder), it.wave).item();
  CHECK(l > 0.5);
  CHECK(l <= std::log(2.0) + 1e-9);
  CHECK(CodeOf([&] { mel(nn::Tensor::Constant(1, 3, {0, 0, 0}), it.wave); }) ==
        ErrorCode::kLengthMismatch);
}

TEST_CASE("reference trimming") {
  std::vector<double> w(85, 0.0);
  CHECK(TrimReference(w, 2, 40).size() == 80);
  CHECK(CodeOf([&] { TrimReference(w, 3, 40); }) == ErrorCode::kLengthMismatch);
  CHECK(CodeOf([&] { TrimReference(std::vector<double>(120, 0.0), 2, 40); }) ==
        ErrorCode::kLengthMismatch);
}

TEST_CASE("lite loss is a batch mean, invariant to item order") {
  Vocoder v(testing::ToyVocConfig());
  auto items = testing::ToyVocItems(v.config(), 3, 6, 12);
  const double a = v.LiteLoss(items).item();
  std::reverse(items.begin(), items.end());
  const double b = v.LiteLoss(items).item();
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
  double sum = 0.0;
  for (const auto &it : items) sum += v.LiteLoss({it}).item();
  CHECK(a == doctest::Approx(sum / 3).epsilon(1e-12));
}

TEST_CASE("crop segment") {
  const auto c = testing::ToyVocConfig();
  const auto it = testing::ToyVocItems(c, 1, 7, 30)[0];
  const auto s = CropSegment(it, 16, c.hop, 99);
  CHECK(s.vq.rows() == 16);
  CHECK(s.wave.size() == 16 * 40);
  // The cropped codes and audio come from the same offset.
  std::size_t start = 0;
  while (start + 16 <= 30) {
    if (std::equal(s.wave.begin(), s.wave.end(), it.wave.begin() + start * 40)) break;
    ++start;
  }
  REQUIRE(start + 16 <= 30);
  for (std::size_t f = 0; f < 16; ++f) CHECK(s.vq(f, 0) == it.vq(start + f, 0));
  CHECK(CropSegment(it, 40, c.hop, 1).vq == it.vq);
}

TEST_CASE("lite training lowers the mel loss and resumes exactly") {
  const auto c = testing::ToyVocConfig();
  const auto data = testing::ToyVocItems(c, 8, 8);
  VocoderTrainOptions opts;
  opts.max_steps = 100;
  opts.batch_size = 4;
  opts.adam.lr = 2e-3;
  Vocoder v(c);
  const auto r = TrainVocoder(v, data, opts);
  CHECK(r.steps == 100);
  CHECK(r.final_mel < r.initial_mel);

  const fs::path a = fs::temp_directory_path() / "vqtts_voc_a";
  const fs::path b = fs::temp_directory_path() / "vqtts_voc_b";
  fs::remove_all(a);
  fs::remove_all(b);
  opts.max_steps = 6;
  opts.ckpt_root = a;
  Vocoder full(c);
  TrainVocoder(full, data, opts);
  opts.ckpt_root = b;
  opts.max_steps = 3;
  Vocoder part(c);
  TrainVocoder(part, data, opts);
  opts.max_steps = 6;
  opts.resume = true;
  Vocoder resumed(c);
  TrainVocoder(resumed, data, opts);
  const auto w1 = full.Generate(data[0].vq, data[0].aux, data[0].spk);
  const auto w2 = resumed.Generate(data[0].vq, data[0].aux, data[0].spk);
  const auto w3 = Vocoder::Load(a / "step6").Generate(data[0].vq, data[0].aux, data[0].spk);
  double worst = 0.0;
  for (std::size_t i = 0; i < w1.size(); ++i) worst = std::max(worst, std::abs(w1[i] - w2[i]));
  CHECK(worst <= 1e-12);
  CHECK(w1 == w3);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("adversarial step completes with finite losses") {
  auto c = testing::ToyVocConfig();
  c.mode = TrainMode::kAdversarial;
  const auto data = testing::ToyVocItems(c, 2, 9);
  Vocoder v(c);
  const fs::path root = fs::temp_directory_path() / "vqtts_voc_adv";
  fs::remove_all(root);
  VocoderTrainOptions opts;
  opts.max_steps = 1;
  opts.batch_size = 2;
  opts.ckpt_root = root;
  const auto r = TrainVocoder(v, data, opts);
  CHECK(r.steps == 1);
  CHECK(std::isfinite(r.mel_losses.at(0)));
  CHECK(std::isfinite(r.last_disc_loss));
  CHECK(std::isfinite(r.last_adv_loss));
  CHECK(std::isfinite(r.last_fm_loss));
  CHECK(r.last_disc_loss > 0.0);
  CHECK(fs::exists(root / "step1" / "disc" / "params.bin"));
  // Discriminator outputs: one per period plus one per scale.
  const auto outs = v.discriminators()(nn::Tensor::Constant(1, 200, std::vector<double>(200, 0.1)));
  CHECK(outs.size() == 4);
  CHECK(outs[0].score.cols() == 100 * 2);
  fs::remove_all(root);
}
