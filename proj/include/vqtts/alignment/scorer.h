// include/vqtts/alignment/scorer.h

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

#ifndef VQTTS_ALIGNMENT_SCORER_H_
#define VQTTS_ALIGNMENT_SCORER_H_

#include "vqtts/alignment/mas.h"
#include "vqtts/base/matrix.h"
#include "vqtts/frontend/tokens.h"

namespace vqtts::alignment {

struct GaussianScorerOptions {
  int em_iterations = 6;
  double var_floor = 1e-2;
  // Per-dimension variance floor as a fraction of the utterance variance;
  // stops a model that wins few frames from collapsing onto them.
  double relative_var_floor = 0.05;
  double frame_hop_s = 0.01;
};

/// Fits one diagonal Gaussian per distinct token symbol of a single
/// utterance by hard (Viterbi) EM and returns the per-frame scores.
///
/// Characters start from a uniform split of the frames over the
/// non-skippable tokens; the `<sil>` model starts from the quietest tenth of
/// the frames (lowest mean feature value). Each score is the Gaussian
/// log-density divided by the feature dimension, which keeps the scores of
/// different feature sizes on one scale.
ScoreMatrix ScoreFramesGaussian(const MatrixD &features,
                                const frontend::TokenSequence &candidates,
                                const GaussianScorerOptions &opts = {});

}  // namespace vqtts::alignment

#endif  // VQTTS_ALIGNMENT_SCORER_H_
