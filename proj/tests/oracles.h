// tests/oracles.h

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

#ifndef VQTTS_TESTS_ORACLES_H_
#define VQTTS_TESTS_ORACLES_H_

// Slow, obviously-correct reference implementations used by the unit tests
// and the acceptance binary.

#include <cmath>
#include <functional>
#include <string>
#include <limits>
#include <random>
#include <vector>

#include "vqtts/base/matrix.h"

namespace vqtts::testing {

struct BrutePath {
  std::vector<int> path;
  double score = -std::numeric_limits<double>::infinity();
  int n_paths = 0;
};

// Enumerates every token assignment in lexicographic order, keeps the legal
// ones and returns the best; the first of equal scores wins.
inline BrutePath BruteForceMas(const MatrixD &logp, const std::vector<bool> &skip) {
  const int T = static_cast<int>(logp.rows()), S = static_cast<int>(logp.cols());
  int first = -1, last = -1;
  for (int s = 0; s < S; ++s) {
    if (!skip[s]) {
      if (first < 0) first = s;
      last = s;
    }
  }
  auto legal = [&](const std::vector<int> &p) {
    if (p[0] != 0 && p[0] != first) return false;
    if (p[T - 1] < last) return false;
    for (int t = 0; t + 1 < T; ++t) {
      const int d = p[t + 1] - p[t];
      if (d == 0 || d == 1) continue;
      if (d == 2 && skip[p[t] + 1]) continue;
      return false;
    }
    return true;
  };
  BrutePath best;
  std::vector<int> p(T, 0);
  while (true) {
    if (legal(p)) {
      ++best.n_paths;
      double sc = 0.0;
      for (int t = 0; t < T; ++t) sc += logp(t, p[t]);
      if (sc > best.score) {
        best.score = sc;
        best.path = p;
      }
    }
    int t = T - 1;
    while (t >= 0 && p[t] == S - 1) p[t--] = 0;
    if (t < 0) break;
    ++p[t];
  }
  return best;
}

// Random mask with no two adjacent skippable tokens.
inline std::vector<bool> RandomSkipMask(int S, std::mt19937_64 &rng, double p = 0.35) {
  std::bernoulli_distribution coin(p);
  std::vector<bool> skip(S, false);
  for (int s = 0; s < S; ++s) {
    if (coin(rng) && (s == 0 || !skip[s - 1])) skip[s] = true;
  }
  bool any_required = false;
  for (int s = 0; s < S; ++s) any_required |= !skip[s];
  if (!any_required) skip[0] = false;
  return skip;
}

// Full (T+1)x(S+1) edit-distance table.
template <typename Seq>
std::size_t EditDistanceOracle(const Seq &a, const Seq &b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                          std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t best = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      if (d[i - 1][j] + 1 < best) best = d[i - 1][j] + 1;
      if (d[i][j - 1] + 1 < best) best = d[i][j - 1] + 1;
      d[i][j] = best;
    }
  }
  return d[a.size()][b.size()];
}

struct OracleUtt {
  std::string id;
  double cer, ll, focus, dur;
};

// Two-stage rule for one speaker, written independently of the library:
// z-scores in long double, repeated max-extraction instead of sorting.
inline std::pair<std::vector<std::string>, std::vector<std::string>> TwoStageOracle(
    std::vector<OracleUtt> utts, double budget1, double budget2, double cer_weight = 1.0) {
  const std::size_t n = utts.size();
  auto zscore = [&](auto field) {
    long double mean = 0, var = 0;
    for (const auto &u : utts) mean += field(u);
    mean /= n;
    for (const auto &u : utts) var += (field(u) - mean) * (field(u) - mean);
    const long double sd = std::sqrt(var / n);
    std::vector<double> z(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = sd > 0 ? static_cast<double>((field(utts[i]) - mean) / sd) : 0.0;
    }
    return z;
  };
  const auto zl = zscore([](const OracleUtt &u) -> long double { return u.ll; });
  const auto zc = zscore([](const OracleUtt &u) -> long double { return u.cer; });
  std::vector<double> score(n);
  for (std::size_t i = 0; i < n; ++i) {
    score[i] = std::round((zl[i] - cer_weight * zc[i]) * 1e9) / 1e9;
  }

  auto extract_order = [](std::size_t count, auto better) {
    std::vector<std::size_t> order;
    std::vector<bool> used(count, false);
    for (std::size_t k = 0; k < count; ++k) {
      std::size_t pick = count;
      for (std::size_t i = 0; i < count; ++i) {
        if (!used[i] && (pick == count || better(i, pick))) pick = i;
      }
      used[pick] = true;
      order.push_back(pick);
    }
    return order;
  };
  const auto order1 = extract_order(n, [&](std::size_t a, std::size_t b) {
    return score[a] > score[b] || (score[a] == score[b] && utts[a].id < utts[b].id);
  });
  std::vector<std::size_t> stage1;
  double used = 0;
  for (std::size_t i : order1) {
    if (used + utts[i].dur <= budget1) {
      used += utts[i].dur;
      stage1.push_back(i);
    }
  }
  const auto order2 = extract_order(stage1.size(), [&](std::size_t a, std::size_t b) {
    const OracleUtt &x = utts[stage1[a]], &y = utts[stage1[b]];
    return x.focus > y.focus || (x.focus == y.focus && x.id < y.id);
  });
  std::vector<std::string> ids1, ids2;
  for (std::size_t i : stage1) ids1.push_back(utts[i].id);
  used = 0;
  for (std::size_t k : order2) {
    const OracleUtt &u = utts[stage1[k]];
    if (used + u.dur <= budget2) {
      used += u.dur;
      ids2.push_back(u.id);
    }
  }
  return {ids1, ids2};
}

}  // namespace vqtts::testing

#endif  // VQTTS_TESTS_ORACLES_H_
