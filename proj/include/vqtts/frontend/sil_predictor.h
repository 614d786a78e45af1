// include/vqtts/frontend/sil_predictor.h

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

#ifndef VQTTS_FRONTEND_SIL_PREDICTOR_H_
#define VQTTS_FRONTEND_SIL_PREDICTOR_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "vqtts/base/config.h"
#include "vqtts/corpus/corpus.h"
#include "vqtts/corpus/store.h"
#include "vqtts/frontend/tokens.h"
#include "vqtts/nn/layers.h"
#include "vqtts/nn/optim.h"

namespace vqtts::frontend {

struct SilTargets {
  std::string utt_id;
  std::vector<bool> labels;  // one per word boundary

  bool operator==(const SilTargets &) const = default;
};

/// Labels for `plain` (no `<sil>`) from the token column of an alignment:
/// boundary b is true iff a `<sil>` row sits in that gap. Throws
/// MalformedRecord when the aligned characters differ from `plain`.
std::vector<bool> LabelsFromAlignedTokens(const TokenSequence &plain,
                                          const std::vector<std::string> &aligned);

/// One SilTargets per utterance from store/<utt>/align.ctm. Throws
/// MissingAlignment naming the first utterance without one.
std::vector<SilTargets> BuildSilTargets(const std::vector<corpus::Utterance> &utts,
                                        const corpus::FeatureStore &store);

/// sil_targets.tsv: `<utt_id>\t<comma-separated 0/1 labels>`.
void WriteSilTargets(const std::filesystem::path &path, const std::vector<SilTargets> &targets);
std::vector<SilTargets> ReadSilTargets(const std::filesystem::path &path);

struct SilPredictorConfig {
  std::size_t width = 128;
  std::size_t heads = 2;
  std::size_t blocks = 2;
  std::size_t ffn_width = 256;
  // Which position's state classifies a boundary: "prev" reads the
  // character before the gap, "next" the one after it.
  std::string reader = "prev";
  std::uint64_t seed = 1;

  static SilPredictorConfig FromConfig(const Config &c);  // keys without prefix
  void ToConfig(Config &c) const;
};

/// Character self-attention boundary classifier. The two-way softmax output
/// is a logistic classifier on the logit difference, trained with binary
/// cross-entropy.
class SilPredictor {
 public:
  SilPredictor(const SilPredictorConfig &config, std::vector<char32_t> alphabet,
               std::vector<std::string> languages);

  /// Vocabulary and language set collected from training sequences.
  static SilPredictor ForData(const SilPredictorConfig &config,
                              const std::vector<TokenSequence> &seqs);
  static SilPredictor Load(const std::filesystem::path &dir, nn::Adam *optim = nullptr);
  void Save(const std::filesystem::path &dir, const nn::Adam *optim) const;

  /// [boundaries x 2] logits for a sequence without `<sil>`.
  nn::Tensor Logits(const TokenSequence &seq) const;
  /// P(silence) per boundary, in [0, 1].
  std::vector<double> Probabilities(const TokenSequence &seq) const;

  nn::ParamStore &params() { return *store_; }
  const nn::ParamStore &params() const { return *store_; }
  const SilPredictorConfig &config() const { return config_; }
  Config ToConfig() const;

 private:
  std::vector<int> Ids(const TokenSequence &seq) const;

  SilPredictorConfig config_;
  std::vector<char32_t> alphabet_;
  std::map<char32_t, int> char_id_;  // 0 is reserved for unknown characters
  std::vector<std::string> languages_;
  std::unique_ptr<nn::ParamStore> store_;
  nn::Tensor char_table_, lang_table_;
  std::vector<nn::TransformerBlock> blocks_;
  nn::LayerNorm final_norm_;
  nn::Linear head_;
};

struct SilExample {
  TokenSequence tokens;  // without <sil>
  std::vector<bool> labels;
};

struct SilTrainOptions {
  int epochs = 20;
  std::size_t batch_size = 16;
  nn::AdamOptions adam;
  std::uint64_t seed = 1;
  std::filesystem::path ckpt_root;  // empty: no checkpoints
  bool resume = false;
};

struct SilTrainResult {
  double initial_loss = 0.0;  // mean BCE before the first update
  double final_loss = 0.0;
  double train_accuracy = 0.0;
  std::vector<double> epoch_losses;
  std::int64_t steps = 0;
};

/// Mean BCE and accuracy (threshold 0.5) over every labelled boundary.
std::pair<double, double> EvaluateSilPredictor(const SilPredictor &model,
                                               const std::vector<SilExample> &data);

/// Throws NoBoundaries if no example has a boundary. With a checkpoint root
/// the final state is written to <root>/step<N>; with `resume` training
/// continues from the newest checkpoint there, counting its epochs as done.
SilTrainResult TrainSilPredictor(SilPredictor &model, const std::vector<SilExample> &data,
                                 const SilTrainOptions &opts);

/// Inserts `<sil>` at every boundary whose probability is >= threshold.
TokenSequence InsertSilsFromProbabilities(const TokenSequence &tokens,
                                          const std::vector<double> &probs,
                                          double threshold = 0.5);
TokenSequence PredictAndInsertSil(const SilPredictor &model, const TokenSequence &tokens,
                                  double threshold = 0.5);

}  // namespace vqtts::frontend

#endif  // VQTTS_FRONTEND_SIL_PREDICTOR_H_
