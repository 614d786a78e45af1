// include/vqtts/txt2vec/acoustic_model.h

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

#ifndef VQTTS_TXT2VEC_ACOUSTIC_MODEL_H_
#define VQTTS_TXT2VEC_ACOUSTIC_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "vqtts/base/config.h"
#include "vqtts/base/matrix.h"
#include "vqtts/features/aux.h"
#include "vqtts/frontend/tokens.h"
#include "vqtts/nn/layers.h"
#include "vqtts/nn/optim.h"

namespace vqtts::txt2vec {

// Token ids: 0 unknown character, 1 `<sil>`, 2.. characters of the alphabet.
inline constexpr int kUnknownId = 0;
inline constexpr int kSilId = 1;

using features::AuxStats;

struct AcousticModelConfig {
  std::vector<char32_t> alphabet;
  std::vector<std::string> languages;
  std::size_t spk_dim = 192;
  std::size_t width = 256;
  std::size_t heads = 2;
  std::size_t enc_blocks = 4;
  std::size_t dec_blocks = 4;
  std::size_t dec_width = 256;
  std::size_t ffn_width = 512;
  std::size_t dur_width = 128;
  std::size_t groups = 2;
  std::size_t codebook_size = 320;
  double lambda_aux = 1.0;
  double lambda_dur = 1.0;
  // When true the duration loss does not update the encoder. Switching it
  // off makes the total loss an ordinary differentiable function of every
  // parameter, which finite-difference checks rely on.
  bool detach_duration = true;
  double voicing_threshold = 0.5;
  AuxStats aux_stats;
  std::uint64_t seed = 1;

  /// Sizes and weights from keys without a prefix; alphabet and languages
  /// are read only when present (checkpoint echo).
  static AcousticModelConfig FromConfig(const Config &c);
  Config ToConfig() const;
};

/// One training utterance. Token and frame data may be padded; the masks
/// must be true on a prefix and false after it. Padding never reaches the
/// network.
struct AcousticItem {
  std::vector<int> token_ids;
  std::vector<bool> token_mask;
  std::vector<double> spk;
  int language = 0;
  MatrixI vq;                  // [frames x G]
  MatrixD aux;                 // [frames x 3] raw pitch Hz, energy, pov
  std::vector<bool> frame_mask;
  std::vector<int> durations;  // per token; sum = valid frames
};

struct AcousticLosses {
  nn::Tensor total;
  double ce_vq = 0.0;
  double l1_aux = 0.0;
  double mse_dur = 0.0;
};

struct AcousticInference {
  MatrixI vq;                  // [T x G]
  MatrixD aux;                 // [T x 3] pitch Hz (0 unvoiced), energy, pov
  std::vector<int> durations;  // per token, sum = T
};

class AcousticModel {
 public:
  explicit AcousticModel(AcousticModelConfig config);

  /// Alphabet and languages taken from the given sequences.
  static AcousticModelConfig WithVocabulary(AcousticModelConfig config,
                                            const std::vector<frontend::TokenSequence> &seqs);
  static AcousticModel Load(const std::filesystem::path &dir, nn::Adam *optim = nullptr);
  void Save(const std::filesystem::path &dir, const nn::Adam *optim,
            const Config &extra = {}) const;

  std::vector<int> TokenIds(const frontend::TokenSequence &seq) const;
  int LanguageIndex(const std::string &language_id) const;  // throws UnknownLanguage

  /// Per-token hidden states [S x width]:
  /// encoder(tokens) + speaker projection + language row.
  nn::Tensor Encode(const std::vector<int> &ids, const std::vector<double> &spk,
                    int language) const;
  /// The linear (bias-free) speaker projection alone, [1 x width].
  nn::Tensor ProjectSpeaker(const std::vector<double> &spk) const;
  /// Predicted log(1 + duration) per token, [S x 1].
  nn::Tensor PredictLogDurations(const nn::Tensor &hidden) const;
  /// round(exp(x) - 1), at least 1 for characters and 0 for `<sil>`.
  static std::vector<int> DurationsFromLog(const std::vector<double> &log_dur,
                                           const std::vector<int> &ids);
  /// Repeats row s durations[s] times. Throws AllZeroDurations.
  static nn::Tensor LengthRegulate(const nn::Tensor &hidden, const std::vector<int> &durations);

  struct Heads {
    nn::Tensor vq_logits;  // [T*G x V], row t*G + g
    nn::Tensor aux;        // [T x 3] normalized pitch, energy, pov in [0, 1]
  };
  Heads Decode(const nn::Tensor &frames) const;

  AcousticLosses Loss(const std::vector<AcousticItem> &batch) const;

  /// Throws EmptyTokens, UnknownLanguage.
  AcousticInference Infer(const frontend::TokenSequence &tokens, const std::vector<double> &spk,
                          const std::string &language_id) const;

  nn::ParamStore &params() { return *store_; }
  const nn::ParamStore &params() const { return *store_; }
  const AcousticModelConfig &config() const { return config_; }
  const nn::Tensor &language_table() const { return lang_table_; }

 private:
  AcousticModelConfig config_;
  std::map<char32_t, int> char_id_;
  std::unique_ptr<nn::ParamStore> store_;
  nn::Tensor token_table_, lang_table_;
  nn::Linear spk_proj_;
  std::vector<nn::TransformerBlock> encoder_, decoder_;
  nn::LayerNorm enc_norm_, dec_norm_;
  nn::Conv1dLayer dur_conv1_, dur_conv2_;
  nn::Linear dur_out_, dec_in_, vq_head_, aux_head_;
};

/// Normalized aux targets and weights used by the aux loss: pitch is
/// weighted only on voiced frames.
void NormalizeAuxTargets(const MatrixD &aux, std::size_t frames, const AuxStats &stats,
                         std::vector<double> &target, std::vector<double> &weight);

struct AcousticTrainOptions {
  std::int64_t max_steps = 50;
  std::size_t batch_size = 8;
  nn::AdamOptions adam;
  std::uint64_t seed = 1;
  std::filesystem::path ckpt_root;  // empty: no checkpoints
  std::int64_t save_every = 0;      // 0: only at the end
  bool resume = false;
};

struct AcousticTrainResult {
  std::vector<double> losses;  // total loss of each step's batch, before the update
  double initial_loss = 0.0;   // step-0 batch loss
  double final_loss = 0.0;     // same batch as step 0, after the last update
  std::int64_t steps = 0;
};

AcousticTrainResult TrainAcousticModel(AcousticModel &model, const std::vector<AcousticItem> &data,
                                       const AcousticTrainOptions &opts);

}  // namespace vqtts::txt2vec

#endif  // VQTTS_TXT2VEC_ACOUSTIC_MODEL_H_
