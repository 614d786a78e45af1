// include/vqtts/features/aux.h

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

#ifndef VQTTS_FEATURES_AUX_H_
#define VQTTS_FEATURES_AUX_H_

#include <vector>

#include "vqtts/base/matrix.h"
#include "vqtts/features/options.h"

namespace vqtts::features {

enum AuxColumn { kPitchHz = 0, kEnergy = 1, kPov = 2 };

/// Per-frame [pitch_hz, log-RMS energy, pov], T = samples / hop.
///
/// Pitch comes from the normalized cross-correlation of each analysis window
/// with its lagged copy over lags sr/f0_max .. sr/f0_min. The shortest-lag
/// local peak within 95% of the best local peak is taken (guards against picking a
/// multiple of the period), refined by parabolic interpolation. pov is that
/// peak clamped to [0, 1]; frames with pov below the voicing threshold get
/// pitch 0. Energy is log RMS over the window, floored at energy_floor.
/// Throws TooShort when the signal is shorter than one hop.
MatrixD ExtractAux(const std::vector<double> &samples, const FeatureOptions &opts);

/// Corpus statistics used to standardize aux tracks for the models.
struct AuxStats {
  double logf0_mean = 5.0;
  double logf0_std = 0.3;
  double energy_mean = -4.0;
  double energy_std = 2.0;
};

/// Mean/std of log-F0 over voiced frames and of energy over all frames.
/// Throws InsufficientData, NoVoicedFrames.
AuxStats ComputeAuxStats(const std::vector<MatrixD> &aux);

/// [T x 3]: z-scored log-F0 (0 on unvoiced frames), z-scored energy, raw pov.
MatrixD NormalizeAux(const MatrixD &aux, const AuxStats &stats);

}  // namespace vqtts::features

#endif  // VQTTS_FEATURES_AUX_H_
