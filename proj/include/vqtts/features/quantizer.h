// include/vqtts/features/quantizer.h

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

#ifndef VQTTS_FEATURES_QUANTIZER_H_
#define VQTTS_FEATURES_QUANTIZER_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vqtts/base/matrix.h"
#include "vqtts/features/options.h"

namespace vqtts::features {

/// Maps a waveform to per-frame code indices [T x G], each in [0, V).
class Quantizer {
 public:
  virtual ~Quantizer() = default;
  virtual std::size_t groups() const = 0;
  virtual std::size_t codebook_size() const = 0;
  virtual MatrixI Quantize(const std::vector<double> &samples,
                           const FeatureOptions &opts) const = 0;
};

/// Checks length, runs the quantizer and validates its output: T equals
/// samples / hop and every index is in range. Throws TooShort.
MatrixI ExtractVq(const std::vector<double> &samples, const Quantizer &quantizer,
                  const FeatureOptions &opts);

/// Index of the nearest row of `centroids` (squared Euclidean); ties go to
/// the lowest index.
std::size_t NearestCentroid(const MatrixD &centroids, std::span<const double> x);

struct KMeansResult {
  MatrixD centroids;               // [V x dim]
  std::vector<double> objective;   // total squared distance after each pass
};

/// k-means++ seeding followed by Lloyd iterations. A centroid that loses all
/// its points keeps its previous position, so the objective never increases.
KMeansResult KMeans(const MatrixD &points, std::size_t V, int iterations, std::uint64_t seed);

/// Stand-in for a pretrained quantizer: per group, a random linear
/// projection of log-mel frames followed by a k-means codebook.
class SurrogateQuantizer : public Quantizer {
 public:
  struct Options {
    std::size_t groups = 2;
    std::size_t codebook_size = 320;
    std::size_t proj_dim = 16;
    int iterations = 20;
    std::size_t max_frames = 50000;  // random subset used for fitting
    std::uint64_t seed = 1;
  };

  /// `mels` are log-mel matrices [T_i x n_mels]. Throws InsufficientData
  /// when there are fewer frames than codebook entries.
  static SurrogateQuantizer Fit(const std::vector<MatrixD> &mels, const Options &opts);

  std::size_t groups() const override { return codebooks_.size(); }
  std::size_t codebook_size() const override { return codebooks_.empty() ? 0 : codebooks_[0].rows(); }
  MatrixI Quantize(const std::vector<double> &samples, const FeatureOptions &opts) const override;
  MatrixI QuantizeFrames(const MatrixD &mel) const;

  /// Frame in group g's projected space.
  std::vector<double> Project(std::size_t g, std::span<const double> frame) const;
  const MatrixD &codebook(std::size_t g) const { return codebooks_[g]; }
  const MatrixD &projection(std::size_t g) const { return projections_[g]; }
  const std::vector<std::vector<double>> &objective_history() const { return history_; }

  void Save(const std::filesystem::path &dir) const;
  static SurrogateQuantizer Load(const std::filesystem::path &dir);

 private:
  std::vector<MatrixD> projections_;  // [n_mels x proj_dim]
  std::vector<MatrixD> codebooks_;    // [V x proj_dim]
  std::vector<std::vector<double>> history_;
};

}  // namespace vqtts::features

#endif  // VQTTS_FEATURES_QUANTIZER_H_
