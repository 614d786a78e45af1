// src/alignment/scorer.cc

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

#include "vqtts/alignment/scorer.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <numbers>

#include "vqtts/base/error.h"

namespace vqtts::alignment {
namespace {

struct Gaussian {
  std::vector<double> mean, var;
};

class SymbolStats {
 public:
  explicit SymbolStats(std::size_t dim) : dim_(dim) {}

  void Reset() {
    n_ = 0;
    sum_.assign(dim_, 0.0);
    sq_.assign(dim_, 0.0);
  }
  void Add(std::span<const double> x) {
    ++n_;
    for (std::size_t d = 0; d < dim_; ++d) {
      sum_[d] += x[d];
      sq_[d] += x[d] * x[d];
    }
  }
  // Leaves `g` untouched when no frames were assigned.
  void Update(Gaussian &g, const std::vector<double> &var_floor) const {
    if (n_ == 0) return;
    g.mean.resize(dim_);
    g.var.resize(dim_);
    for (std::size_t d = 0; d < dim_; ++d) {
      const double m = sum_[d] / n_;
      g.mean[d] = m;
      g.var[d] = std::max(sq_[d] / n_ - m * m, var_floor[d]);
    }
  }

 private:
  std::size_t dim_;
  std::size_t n_ = 0;
  std::vector<double> sum_, sq_;
};

double LogDensityPerDim(const Gaussian &g, std::span<const double> x) {
  static const double kLog2Pi = std::log(2.0 * std::numbers::pi);
  double acc = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double diff = x[d] - g.mean[d];
    acc += -0.5 * (kLog2Pi + std::log(g.var[d]) + diff * diff / g.var[d]);
  }
  return acc / static_cast<double>(x.size());
}

}  // namespace

ScoreMatrix ScoreFramesGaussian(const MatrixD &features,
                                const frontend::TokenSequence &candidates,
                                const GaussianScorerOptions &opts) {
  const std::size_t T = features.rows(), D = features.cols(), S = candidates.size();
  if (T == 0 || D == 0 || S == 0) Fail(ErrorCode::kInvalidArgument, "empty scorer input");

  std::map<std::string, int> symbol_id;
  std::vector<int> sym_of_token(S);
  std::vector<std::size_t> chars;
  for (std::size_t s = 0; s < S; ++s) {
    auto [it, fresh] = symbol_id.emplace(candidates.tokens[s], static_cast<int>(symbol_id.size()));
    sym_of_token[s] = it->second;
    if (!candidates.IsSil(s)) chars.push_back(s);
  }
  if (chars.empty() || T < chars.size()) {
    Fail(ErrorCode::kInfeasibleAlignment,
         std::to_string(T) + " frames for " + std::to_string(chars.size()) + " characters");
  }
  const std::size_t n_sym = symbol_id.size();
  std::vector<Gaussian> models(n_sym);
  std::vector<SymbolStats> stats(n_sym, SymbolStats(D));

  // Global statistics seed every symbol so none is ever left undefined.
  SymbolStats global(D);
  global.Reset();
  for (std::size_t t = 0; t < T; ++t) global.Add(features.row(t));
  std::vector<double> floor(D, opts.var_floor);
  {
    Gaussian all;
    global.Update(all, floor);
    for (std::size_t d = 0; d < D; ++d) {
      floor[d] = std::max(opts.var_floor, opts.relative_var_floor * all.var[d]);
    }
  }
  for (Gaussian &g : models) global.Update(g, floor);

  for (SymbolStats &st : stats) st.Reset();
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t k = t * chars.size() / T;
    stats[sym_of_token[chars[k]]].Add(features.row(t));
  }
  auto sil_it = symbol_id.find(std::string(frontend::kSilToken));
  if (sil_it != symbol_id.end()) {
    std::vector<double> level(T);
    for (std::size_t t = 0; t < T; ++t) {
      const auto r = features.row(t);
      level[t] = std::accumulate(r.begin(), r.end(), 0.0) / D;
    }
    std::vector<std::size_t> order(T);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return level[a] < level[b]; });
    const std::size_t quiet = std::max<std::size_t>(1, T / 10);
    for (std::size_t i = 0; i < quiet; ++i) stats[sil_it->second].Add(features.row(order[i]));
  }
  for (std::size_t k = 0; k < n_sym; ++k) stats[k].Update(models[k], floor);

  ScoreMatrix scores;
  scores.frame_hop_s = opts.frame_hop_s;
  scores.logp = MatrixD(T, S);
  const std::vector<bool> mask = frontend::SkippableMask(candidates);
  auto rescore = [&] {
    std::vector<double> per_sym(n_sym);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t k = 0; k < n_sym; ++k) per_sym[k] = LogDensityPerDim(models[k], features.row(t));
      for (std::size_t s = 0; s < S; ++s) scores.logp(t, s) = per_sym[sym_of_token[s]];
    }
  };
  for (int it = 0; it < opts.em_iterations; ++it) {
    rescore();
    const AlignmentPath path = MasViterbi(scores, mask);
    for (SymbolStats &st : stats) st.Reset();
    for (std::size_t t = 0; t < T; ++t) {
      stats[sym_of_token[path.token_of_frame[t]]].Add(features.row(t));
    }
    for (std::size_t k = 0; k < n_sym; ++k) stats[k].Update(models[k], floor);
  }
  rescore();
  return scores;
}

}  // namespace vqtts::alignment
