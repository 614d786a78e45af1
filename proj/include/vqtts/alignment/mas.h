// include/vqtts/alignment/mas.h

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

#ifndef VQTTS_ALIGNMENT_MAS_H_
#define VQTTS_ALIGNMENT_MAS_H_

#include <string_view>
#include <vector>

#include "vqtts/base/matrix.h"
#include "vqtts/corpus/store.h"
#include "vqtts/frontend/tokens.h"

namespace vqtts::alignment {

/// Per-frame per-token log scores, [T frames x S tokens].
struct ScoreMatrix {
  MatrixD logp;
  double frame_hop_s = 0.01;

  std::size_t frames() const { return logp.rows(); }
  std::size_t tokens() const { return logp.cols(); }
};

struct AlignmentPath {
  std::vector<int> token_of_frame;
  double loglik = 0.0;
  double normalized_loglik = 0.0;  // loglik / T
};

// Allowed moves from token s at frame t to frame t+1: stay on s, advance to
// s+1, or jump to s+2 when s+1 is skippable. A path starts on token 0 or on
// the first non-skippable token and ends on the last non-skippable token or
// later. Skippable tokens must not be adjacent.

/// Maximum-score monotonic path. Among equal-score paths the one whose
/// token_of_frame is lexicographically smallest wins, i.e. the one that
/// stays longest before each advance. Throws InfeasibleAlignment when
/// T is smaller than the number of non-skippable tokens.
AlignmentPath MasViterbi(const ScoreMatrix &scores,
                         const std::vector<bool> &skippable);

/// Sum of logp along `token_of_frame`.
double PathScore(const ScoreMatrix &scores, const std::vector<int> &token_of_frame);

/// Throws InvalidArgument unless `token_of_frame` is a legal path over S
/// tokens under the move rules above.
void CheckPath(const std::vector<int> &token_of_frame, std::size_t S,
               const std::vector<bool> &skippable);

/// Posterior token occupancy per frame from forward-backward over the same
/// topology: a soft, row-stochastic attention matrix [T x S].
MatrixD SoftAttention(const ScoreMatrix &scores, const std::vector<bool> &skippable);

/// Mean over frames of the row maximum. Throws NotRowStochastic.
double FocusRate(const MatrixD &attention);

/// One-hot attention rows for a hard path.
MatrixD PathToAttention(const AlignmentPath &path, std::size_t S);

/// Frames per token. Validates the path against `skippable`.
std::vector<int> DurationsFromPath(const AlignmentPath &path, std::size_t S,
                                   const std::vector<bool> &skippable);

/// For each word boundary of `candidates` (which carries a `<sil>` at every
/// boundary), whether that `<sil>` receives at least min_sil_frames frames
/// on the optimal path.
std::vector<bool> DetectSilences(std::string_view utt_id,
                                 const frontend::TokenSequence &candidates,
                                 const ScoreMatrix &scores, int min_sil_frames);

/// Flags from an already computed path.
std::vector<bool> SilencesFromDurations(const frontend::TokenSequence &candidates,
                                        const std::vector<int> &durations,
                                        int min_sil_frames);

/// Final token sequence and durations once silences are decided: detected
/// `<sil>` tokens stay, the rest are removed and their frames (fewer than
/// min_sil_frames) go to the preceding character so durations still sum to T.
struct FinalAlignment {
  frontend::TokenSequence tokens;
  std::vector<int> durations;
  std::vector<bool> sil_flags;
};
FinalAlignment FinalizeAlignment(const frontend::TokenSequence &candidates,
                                 const std::vector<int> &durations,
                                 int min_sil_frames);

std::vector<corpus::CtmEntry> ToCtm(const frontend::TokenSequence &tokens,
                                    const std::vector<int> &durations);

}  // namespace vqtts::alignment

#endif  // VQTTS_ALIGNMENT_MAS_H_
