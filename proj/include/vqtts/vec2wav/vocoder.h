// include/vqtts/vec2wav/vocoder.h

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

#ifndef VQTTS_VEC2WAV_VOCODER_H_
#define VQTTS_VEC2WAV_VOCODER_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "vqtts/base/config.h"
#include "vqtts/base/matrix.h"
#include "vqtts/features/aux.h"
#include "vqtts/nn/layers.h"
#include "vqtts/nn/optim.h"

namespace vqtts::vec2wav {

enum class TrainMode { kLite, kAdversarial };

struct VocoderConfig {
  std::size_t groups = 2;
  std::size_t codebook_size = 320;
  std::size_t code_dim = 32;   // per group
  std::size_t aux_dim = 16;    // projected aux width
  std::size_t enc_width = 128;
  std::size_t enc_blocks = 4;
  std::size_t enc_kernel = 5;
  std::size_t gen_channels = 128;
  std::vector<std::size_t> upsample_rates = {5, 4, 4, 2};
  std::size_t hop = 160;
  std::size_t spk_dim = 192;
  int sample_rate = 16000;
  features::AuxStats aux_stats;

  TrainMode mode = TrainMode::kLite;
  std::size_t segment_frames = 32;
  // Mel loss analysis.
  std::size_t loss_n_fft = 512;
  std::size_t loss_win = 400;
  std::size_t loss_hop = 80;
  std::size_t loss_n_mels = 40;
  // Discriminators.
  std::vector<std::size_t> periods = {2, 3, 5, 7, 11};
  std::size_t scales = 3;
  std::size_t disc_channels = 16;
  double lambda_mel = 45.0;
  double lambda_adv = 1.0;
  double lambda_fm = 2.0;
  std::uint64_t seed = 1;

  std::size_t input_width() const { return groups * code_dim + aux_dim; }

  /// Throws BadConfig, including when the upsample rates do not multiply to hop.
  static VocoderConfig FromConfig(const Config &c);
  Config ToConfig() const;
};

/// One training pair. `wave` holds the reference audio; it may exceed
/// T * hop by less than one hop (the tail is trimmed).
struct VocoderItem {
  MatrixI vq;    // [T x G]
  MatrixD aux;   // [T x 3] raw pitch Hz, energy, pov
  std::vector<double> spk;
  std::vector<double> wave;
};

/// Reference audio trimmed to T * hop; throws LengthMismatch when it is
/// shorter than that or longer by a full hop or more.
std::vector<double> TrimReference(const std::vector<double> &wave, std::size_t frames,
                                  std::size_t hop);

class MelLoss {
 public:
  explicit MelLoss(const VocoderConfig &c);
  /// [frames x n_mels] log-mel of a [1 x n] signal, differentiable.
  nn::Tensor LogMel(const nn::Tensor &wave) const;
  /// Mean absolute log-mel difference. Throws LengthMismatch.
  nn::Tensor operator()(const nn::Tensor &generated, const std::vector<double> &reference) const;

 private:
  std::size_t n_fft_, win_, hop_;
  nn::Tensor filterbank_;
  double floor_ = 1e-5;
};

struct DiscOutput {
  nn::Tensor score;
  std::vector<nn::Tensor> features;
};

/// Multi-period (stride-1 dilated convolutions on each phase of the folded
/// signal) and multi-scale discriminators.
class Discriminators {
 public:
  Discriminators(nn::ParamStore &store, const VocoderConfig &c);
  std::vector<DiscOutput> operator()(const nn::Tensor &wave) const;

 private:
  struct Stack {
    std::vector<nn::Conv1dLayer> layers;
  };
  DiscOutput Run(const Stack &s, const nn::Tensor &x) const;

  std::vector<std::size_t> periods_;
  std::vector<Stack> mpd_, msd_;
};

class Vocoder {
 public:
  explicit Vocoder(VocoderConfig config);

  static Vocoder Load(const std::filesystem::path &dir, nn::Adam *gen_optim = nullptr,
                      nn::Adam *disc_optim = nullptr);
  /// Generator state in `dir`; discriminators in `dir/disc` when adversarial.
  void Save(const std::filesystem::path &dir, const nn::Adam *gen_optim,
            const nn::Adam *disc_optim) const;

  /// [T x input_width]. Throws IndexOutOfRange, EmptyInput, LengthMismatch.
  nn::Tensor EmbedCodes(const MatrixI &vq, const MatrixD &aux) const;
  /// Feature encoder output with the speaker vector added, [enc_width x T].
  nn::Tensor Encode(const MatrixI &vq, const MatrixD &aux, const std::vector<double> &spk) const;
  /// [1 x T * hop] in [-1, 1].
  nn::Tensor GenerateTensor(const MatrixI &vq, const MatrixD &aux,
                            const std::vector<double> &spk) const;
  std::vector<double> Generate(const MatrixI &vq, const MatrixD &aux,
                               const std::vector<double> &spk) const;

  /// Lite loss: mean over items of the mel L1 on whole items.
  nn::Tensor LiteLoss(const std::vector<VocoderItem> &batch) const;

  const VocoderConfig &config() const { return config_; }
  nn::ParamStore &gen_params() { return *gen_store_; }
  nn::ParamStore &disc_params() { return *disc_store_; }
  const MelLoss &mel_loss() const { return mel_; }
  const Discriminators &discriminators() const { return *disc_; }

 private:
  VocoderConfig config_;
  std::unique_ptr<nn::ParamStore> gen_store_, disc_store_;
  std::vector<nn::Tensor> code_tables_;
  nn::Linear aux_proj_, spk_proj_;
  nn::Conv1dLayer enc_in_;
  std::vector<std::pair<nn::Conv1dLayer, nn::Conv1dLayer>> enc_blocks_;
  nn::Conv1dLayer gen_pre_, gen_post_;
  struct UpStage {
    std::size_t rate;
    nn::Conv1dLayer up, res1, res2;
  };
  std::vector<UpStage> stages_;
  MelLoss mel_;
  std::unique_ptr<Discriminators> disc_;
};

/// Random `segment_frames` window of an item (whole item if shorter).
VocoderItem CropSegment(const VocoderItem &item, std::size_t segment_frames, std::size_t hop,
                        std::uint64_t seed);

struct VocoderTrainOptions {
  std::int64_t max_steps = 100;
  std::size_t batch_size = 4;
  nn::AdamOptions adam{2e-4, 0.8, 0.99, 1e-9, 10.0};
  std::uint64_t seed = 1;
  std::filesystem::path ckpt_root;
  std::int64_t save_every = 0;
  bool resume = false;
};

struct VocoderTrainResult {
  std::vector<double> mel_losses;  // per step, before the update
  double initial_mel = 0.0;        // first batch of the run, before training
  double final_mel = 0.0;          // same batch and segments after training
  std::int64_t steps = 0;
  double last_disc_loss = 0.0;     // adversarial mode only
  double last_adv_loss = 0.0;
  double last_fm_loss = 0.0;
};

VocoderTrainResult TrainVocoder(Vocoder &voc, const std::vector<VocoderItem> &data,
                                const VocoderTrainOptions &opts);

}  // namespace vqtts::vec2wav

#endif  // VQTTS_VEC2WAV_VOCODER_H_
