// src/features/quantizer.cc

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

#include "vqtts/features/quantizer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "vqtts/base/error.h"
#include "vqtts/dsp/mel.h"
#include "vqtts/nn/optim.h"

namespace vqtts::features {

MatrixI ExtractVq(const std::vector<double> &samples, const Quantizer &quantizer,
                  const FeatureOptions &opts) {
  if (samples.size() < opts.hop) {
    Fail(ErrorCode::kTooShort, std::to_string(samples.size()) + " samples < hop");
  }
  MatrixI idx = quantizer.Quantize(samples, opts);
  if (idx.rows() != samples.size() / opts.hop || idx.cols() != quantizer.groups()) {
    Fail(ErrorCode::kShapeMismatch, "quantizer output has the wrong shape");
  }
  for (int v : idx.data()) {
    if (v < 0 || static_cast<std::size_t>(v) >= quantizer.codebook_size()) {
      Fail(ErrorCode::kIndexOutOfRange, "quantizer produced index " + std::to_string(v));
    }
  }
  return idx;
}

std::size_t NearestCentroid(const MatrixD &centroids, std::span<const double> x) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < centroids.rows(); ++k) {
    const auto c = centroids.row(k);
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] - c[i]) * (x[i] - c[i]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

namespace {

double SqDist(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

}  // namespace

KMeansResult KMeans(const MatrixD &points, std::size_t V, int iterations, std::uint64_t seed) {
  const std::size_t N = points.rows(), dim = points.cols();
  if (V < 1 || N < V) {
    Fail(ErrorCode::kInsufficientData,
         std::to_string(N) + " points for " + std::to_string(V) + " centroids");
  }
  std::mt19937_64 rng(seed);
  KMeansResult res;
  res.centroids = MatrixD(V, dim);
  // k-means++ seeding.
  std::vector<double> d2(N, std::numeric_limits<double>::infinity());
  std::size_t pick = std::uniform_int_distribution<std::size_t>(0, N - 1)(rng);
  for (std::size_t k = 0; k < V; ++k) {
    std::copy_n(points.row(pick).begin(), dim, res.centroids.row(k).begin());
    double total = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      d2[i] = std::min(d2[i], SqDist(points.row(i), res.centroids.row(k)));
      total += d2[i];
    }
    if (k + 1 == V) break;
    if (total <= 0.0) {
      // Fewer distinct points than centroids: reuse points in order.
      pick = (pick + 1) % N;
      continue;
    }
    double r = std::uniform_real_distribution<double>(0.0, total)(rng);
    pick = N - 1;
    for (std::size_t i = 0; i < N; ++i) {
      r -= d2[i];
      if (r < 0.0 && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
    while (d2[pick] <= 0.0 && pick > 0) --pick;
  }

  std::vector<std::size_t> assign(N);
  std::vector<double> sums(V * dim);
  std::vector<std::size_t> counts(V);
  for (int it = 0; it < std::max(iterations, 1); ++it) {
    double obj = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      assign[i] = NearestCentroid(res.centroids, points.row(i));
      obj += SqDist(points.row(i), res.centroids.row(assign[i]));
    }
    res.objective.push_back(obj);
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < N; ++i) {
      ++counts[assign[i]];
      const auto p = points.row(i);
      for (std::size_t d = 0; d < dim; ++d) sums[assign[i] * dim + d] += p[d];
    }
    for (std::size_t k = 0; k < V; ++k) {
      if (counts[k] == 0) continue;
      for (std::size_t d = 0; d < dim; ++d) {
        res.centroids(k, d) = sums[k * dim + d] / static_cast<double>(counts[k]);
      }
    }
  }
  double obj = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    obj += SqDist(points.row(i), res.centroids.row(NearestCentroid(res.centroids, points.row(i))));
  }
  res.objective.push_back(obj);
  return res;
}

SurrogateQuantizer SurrogateQuantizer::Fit(const std::vector<MatrixD> &mels, const Options &opts) {
  if (opts.groups == 0 || opts.codebook_size < 2 || opts.proj_dim == 0) {
    Fail(ErrorCode::kBadConfig, "quantizer needs G >= 1, V >= 2, proj_dim >= 1");
  }
  std::size_t total = 0, n_mels = 0;
  for (const MatrixD &m : mels) {
    if (m.rows() == 0) continue;
    if (n_mels != 0 && m.cols() != n_mels) Fail(ErrorCode::kShapeMismatch, "mixed mel sizes");
    n_mels = m.cols();
    total += m.rows();
  }
  if (total < opts.codebook_size) {
    Fail(ErrorCode::kInsufficientData, std::to_string(total) + " frames for V = " +
                                           std::to_string(opts.codebook_size));
  }
  std::mt19937_64 rng(opts.seed);
  // Fitting subset.
  std::vector<std::pair<std::size_t, std::size_t>> refs;
  for (std::size_t u = 0; u < mels.size(); ++u) {
    for (std::size_t t = 0; t < mels[u].rows(); ++t) refs.emplace_back(u, t);
  }
  if (refs.size() > opts.max_frames && opts.max_frames >= opts.codebook_size) {
    std::shuffle(refs.begin(), refs.end(), rng);
    refs.resize(opts.max_frames);
    std::sort(refs.begin(), refs.end());
  }

  SurrogateQuantizer q;
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(n_mels)));
  for (std::size_t g = 0; g < opts.groups; ++g) {
    MatrixD proj(n_mels, opts.proj_dim);
    for (double &v : proj.data()) v = gauss(rng);
    q.projections_.push_back(std::move(proj));
    MatrixD pts(refs.size(), opts.proj_dim);
    for (std::size_t i = 0; i < refs.size(); ++i) {
      const auto p = q.Project(g, mels[refs[i].first].row(refs[i].second));
      std::copy(p.begin(), p.end(), pts.row(i).begin());
    }
    KMeansResult km = KMeans(pts, opts.codebook_size, opts.iterations, rng());
    q.codebooks_.push_back(std::move(km.centroids));
    q.history_.push_back(std::move(km.objective));
  }
  return q;
}

std::vector<double> SurrogateQuantizer::Project(std::size_t g, std::span<const double> frame) const {
  const MatrixD &p = projections_[g];
  if (frame.size() != p.rows()) Fail(ErrorCode::kShapeMismatch, "mel width != projection rows");
  std::vector<double> out(p.cols(), 0.0);
  for (std::size_t i = 0; i < p.rows(); ++i) {
    for (std::size_t j = 0; j < p.cols(); ++j) out[j] += frame[i] * p(i, j);
  }
  return out;
}

MatrixI SurrogateQuantizer::QuantizeFrames(const MatrixD &mel) const {
  MatrixI idx(mel.rows(), groups());
  for (std::size_t t = 0; t < mel.rows(); ++t) {
    for (std::size_t g = 0; g < groups(); ++g) {
      idx(t, g) = static_cast<int>(NearestCentroid(codebooks_[g], Project(g, mel.row(t))));
    }
  }
  return idx;
}

MatrixI SurrogateQuantizer::Quantize(const std::vector<double> &samples,
                                     const FeatureOptions &opts) const {
  return QuantizeFrames(dsp::LogMel(samples, opts.Mel()));
}

void SurrogateQuantizer::Save(const std::filesystem::path &dir) const {
  nn::ParamStore store;
  for (std::size_t g = 0; g < groups(); ++g) {
    store.Fill("proj" + std::to_string(g), projections_[g].rows(), projections_[g].cols(), 0.0);
    auto pv = store.Find("proj" + std::to_string(g)).mutable_value();
    std::copy(projections_[g].data().begin(), projections_[g].data().end(), pv.begin());
    store.Fill("codebook" + std::to_string(g), codebooks_[g].rows(), codebooks_[g].cols(), 0.0);
    auto cv = store.Find("codebook" + std::to_string(g)).mutable_value();
    std::copy(codebooks_[g].data().begin(), codebooks_[g].data().end(), cv.begin());
  }
  Config c;
  c.Set("groups", std::to_string(groups()));
  c.Set("codebook_size", std::to_string(codebook_size()));
  c.Set("n_mels", std::to_string(groups() ? projections_[0].rows() : 0));
  c.Set("proj_dim", std::to_string(groups() ? projections_[0].cols() : 0));
  nn::SaveCheckpoint(dir, c, store, nullptr);
}

SurrogateQuantizer SurrogateQuantizer::Load(const std::filesystem::path &dir) {
  const Config c = nn::ReadCheckpointConfig(dir);
  const std::size_t G = c.GetInt("groups", 0), V = c.GetInt("codebook_size", 0);
  const std::size_t n_mels = c.GetInt("n_mels", 0), dim = c.GetInt("proj_dim", 0);
  if (G == 0 || V < 2 || n_mels == 0 || dim == 0) {
    Fail(ErrorCode::kCorruptCheckpoint, "bad quantizer config in " + dir.string());
  }
  nn::ParamStore store;
  for (std::size_t g = 0; g < G; ++g) {
    store.Fill("proj" + std::to_string(g), n_mels, dim, 0.0);
    store.Fill("codebook" + std::to_string(g), V, dim, 0.0);
  }
  nn::LoadCheckpointParams(dir, store, nullptr);
  SurrogateQuantizer q;
  for (std::size_t g = 0; g < G; ++g) {
    const auto pv = store.Find("proj" + std::to_string(g)).value();
    q.projections_.emplace_back(n_mels, dim, std::vector<double>(pv.begin(), pv.end()));
    const auto cv = store.Find("codebook" + std::to_string(g)).value();
    q.codebooks_.emplace_back(V, dim, std::vector<double>(cv.begin(), cv.end()));
  }
  return q;
}

}  // namespace vqtts::features
