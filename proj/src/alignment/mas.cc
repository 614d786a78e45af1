// src/alignment/mas.cc

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

#include "vqtts/alignment/mas.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vqtts/base/error.h"

namespace vqtts::alignment {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Topology {
  std::size_t S = 0;
  std::vector<bool> skip;
  std::size_t first = 0;  // first non-skippable token
  std::size_t last = 0;   // last non-skippable token
  std::size_t required = 0;

  bool CanStart(std::size_t s) const { return s == 0 || s == first; }
  bool CanEnd(std::size_t s) const { return s >= last; }
  // Successors of s in preference order: stay, advance, skip.
  int Successors(std::size_t s, std::size_t out[3]) const {
    int n = 0;
    out[n++] = s;
    if (s + 1 < S) out[n++] = s + 1;
    if (s + 2 < S && skip[s + 1]) out[n++] = s + 2;
    return n;
  }
};

Topology MakeTopology(std::size_t S, const std::vector<bool> &skippable) {
  if (S == 0) Fail(ErrorCode::kInvalidArgument, "alignment needs S >= 1");
  if (skippable.size() != S) {
    Fail(ErrorCode::kShapeMismatch, "skippable mask length != token count");
  }
  Topology topo;
  topo.S = S;
  topo.skip = skippable;
  for (std::size_t s = 0; s + 1 < S; ++s) {
    if (skippable[s] && skippable[s + 1]) {
      Fail(ErrorCode::kInvalidArgument, "adjacent skippable tokens");
    }
  }
  bool any = false;
  for (std::size_t s = 0; s < S; ++s) {
    if (skippable[s]) continue;
    if (!any) topo.first = s;
    topo.last = s;
    any = true;
    ++topo.required;
  }
  return topo;
}

void CheckScores(const ScoreMatrix &scores) {
  if (scores.frames() == 0 || scores.tokens() == 0) {
    Fail(ErrorCode::kInvalidArgument, "empty score matrix");
  }
  for (double v : scores.logp.data()) {
    if (!std::isfinite(v)) Fail(ErrorCode::kInvalidArgument, "non-finite score");
  }
}

double LogAddExp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

AlignmentPath MasViterbi(const ScoreMatrix &scores,
                         const std::vector<bool> &skippable) {
  CheckScores(scores);
  const Topology topo = MakeTopology(scores.tokens(), skippable);
  const std::size_t T = scores.frames(), S = topo.S;
  if (T < topo.required) {
    Fail(ErrorCode::kInfeasibleAlignment,
         std::to_string(T) + " frames for " + std::to_string(topo.required) +
             " non-skippable tokens");
  }
  // best[t][s]: best score of frames t..T-1 given frame t sits on token s.
  // Decoding forward over suffix values makes the lexicographic tie-break a
  // local choice.
  MatrixD best(T, S, kNegInf);
  for (std::size_t s = 0; s < S; ++s) {
    if (topo.CanEnd(s)) best(T - 1, s) = scores.logp(T - 1, s);
  }
  std::size_t succ[3];
  for (std::size_t t = T - 1; t-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      double m = kNegInf;
      const int n = topo.Successors(s, succ);
      for (int i = 0; i < n; ++i) m = std::max(m, best(t + 1, succ[i]));
      if (m != kNegInf) best(t, s) = scores.logp(t, s) + m;
    }
  }
  std::size_t cur = S;
  double total = kNegInf;
  for (std::size_t s = 0; s < S; ++s) {
    if (topo.CanStart(s) && best(0, s) > total) {
      total = best(0, s);
      cur = s;
    }
  }
  if (cur == S) Fail(ErrorCode::kInfeasibleAlignment, "no feasible path");

  AlignmentPath path;
  path.token_of_frame.resize(T);
  path.token_of_frame[0] = static_cast<int>(cur);
  for (std::size_t t = 0; t + 1 < T; ++t) {
    const int n = topo.Successors(cur, succ);
    double m = kNegInf;
    for (int i = 0; i < n; ++i) m = std::max(m, best(t + 1, succ[i]));
    for (int i = 0; i < n; ++i) {
      if (best(t + 1, succ[i]) == m) {
        cur = succ[i];
        break;
      }
    }
    path.token_of_frame[t + 1] = static_cast<int>(cur);
  }
  path.loglik = total;
  path.normalized_loglik = total / static_cast<double>(T);
  return path;
}

double PathScore(const ScoreMatrix &scores, const std::vector<int> &token_of_frame) {
  if (token_of_frame.size() != scores.frames()) {
    Fail(ErrorCode::kShapeMismatch, "path length != frame count");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < token_of_frame.size(); ++t) {
    total += scores.logp(t, token_of_frame[t]);
  }
  return total;
}

void CheckPath(const std::vector<int> &token_of_frame, std::size_t S,
               const std::vector<bool> &skippable) {
  const Topology topo = MakeTopology(S, skippable);
  const auto bad = [](const std::string &why) {
    Fail(ErrorCode::kInvalidArgument, "invalid path: " + why);
  };
  if (token_of_frame.empty()) bad("empty");
  for (int s : token_of_frame) {
    if (s < 0 || static_cast<std::size_t>(s) >= S) bad("token index out of range");
  }
  if (!topo.CanStart(token_of_frame.front())) bad("bad first token");
  if (!topo.CanEnd(token_of_frame.back())) bad("bad last token");
  for (std::size_t t = 0; t + 1 < token_of_frame.size(); ++t) {
    const int a = token_of_frame[t], b = token_of_frame[t + 1];
    const bool ok = b == a || b == a + 1 || (b == a + 2 && skippable[a + 1]);
    if (!ok) bad("illegal step at frame " + std::to_string(t));
  }
}

MatrixD SoftAttention(const ScoreMatrix &scores, const std::vector<bool> &skippable) {
  CheckScores(scores);
  const Topology topo = MakeTopology(scores.tokens(), skippable);
  const std::size_t T = scores.frames(), S = topo.S;
  if (T < topo.required) {
    Fail(ErrorCode::kInfeasibleAlignment, "too few frames for soft attention");
  }
  MatrixD alpha(T, S, kNegInf), beta(T, S, kNegInf);
  for (std::size_t s = 0; s < S; ++s) {
    if (topo.CanStart(s)) alpha(0, s) = scores.logp(0, s);
    if (topo.CanEnd(s)) beta(T - 1, s) = 0.0;
  }
  std::size_t succ[3];
  for (std::size_t t = 0; t + 1 < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      if (alpha(t, s) == kNegInf) continue;
      const int n = topo.Successors(s, succ);
      for (int i = 0; i < n; ++i) {
        double &dst = alpha(t + 1, succ[i]);
        dst = LogAddExp(dst, alpha(t, s) + scores.logp(t + 1, succ[i]));
      }
    }
  }
  for (std::size_t t = T - 1; t-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      double acc = kNegInf;
      const int n = topo.Successors(s, succ);
      for (int i = 0; i < n; ++i) {
        acc = LogAddExp(acc, beta(t + 1, succ[i]) + scores.logp(t + 1, succ[i]));
      }
      beta(t, s) = acc;
    }
  }
  double log_z = kNegInf;
  for (std::size_t s = 0; s < S; ++s) log_z = LogAddExp(log_z, alpha(T - 1, s) + beta(T - 1, s));
  MatrixD post(T, S, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    double row = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      const double v = alpha(t, s) + beta(t, s);
      post(t, s) = v == kNegInf ? 0.0 : std::exp(v - log_z);
      row += post(t, s);
    }
    // Remove accumulated rounding so the rows pass the stochastic check.
    for (std::size_t s = 0; s < S; ++s) post(t, s) /= row;
  }
  return post;
}

double FocusRate(const MatrixD &attention) {
  if (attention.rows() == 0 || attention.cols() == 0) {
    Fail(ErrorCode::kNotRowStochastic, "empty attention matrix");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < attention.rows(); ++t) {
    double sum = 0.0, mx = 0.0;
    for (double v : attention.row(t)) {
      if (!(v >= 0.0)) {
        Fail(ErrorCode::kNotRowStochastic, "negative weight in row " + std::to_string(t));
      }
      sum += v;
      mx = std::max(mx, v);
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      Fail(ErrorCode::kNotRowStochastic, "row " + std::to_string(t) + " sums to " +
                                             std::to_string(sum));
    }
    total += mx;
  }
  return total / static_cast<double>(attention.rows());
}

MatrixD PathToAttention(const AlignmentPath &path, std::size_t S) {
  MatrixD att(path.token_of_frame.size(), S, 0.0);
  for (std::size_t t = 0; t < path.token_of_frame.size(); ++t) {
    const int s = path.token_of_frame[t];
    if (s < 0 || static_cast<std::size_t>(s) >= S) {
      Fail(ErrorCode::kIndexOutOfRange, "path token outside [0, S)");
    }
    att(t, s) = 1.0;
  }
  return att;
}

std::vector<int> DurationsFromPath(const AlignmentPath &path, std::size_t S,
                                   const std::vector<bool> &skippable) {
  CheckPath(path.token_of_frame, S, skippable);
  std::vector<int> frames(S, 0);
  for (int s : path.token_of_frame) ++frames[s];
  return frames;
}

std::vector<bool> SilencesFromDurations(const frontend::TokenSequence &candidates,
                                        const std::vector<int> &durations,
                                        int min_sil_frames) {
  if (min_sil_frames < 1) Fail(ErrorCode::kInvalidArgument, "min_sil_frames < 1");
  if (durations.size() != candidates.size()) {
    Fail(ErrorCode::kShapeMismatch, "durations do not match token count");
  }
  std::vector<bool> flags;
  flags.reserve(candidates.boundaries.size());
  for (int b : candidates.boundaries) {
    flags.push_back(candidates.IsSil(b) && durations[b] >= min_sil_frames);
  }
  return flags;
}

std::vector<bool> DetectSilences(std::string_view utt_id,
                                 const frontend::TokenSequence &candidates,
                                 const ScoreMatrix &scores, int min_sil_frames) {
  if (min_sil_frames < 1) Fail(ErrorCode::kInvalidArgument, "min_sil_frames < 1");
  if (candidates.size() != scores.tokens()) {
    Fail(ErrorCode::kShapeMismatch,
         std::string(utt_id) + ": score columns != candidate token count");
  }
  const std::vector<bool> mask = frontend::SkippableMask(candidates);
  AlignmentPath path;
  try {
    path = MasViterbi(scores, mask);
  } catch (const Error &e) {
    if (e.code() != ErrorCode::kInfeasibleAlignment) throw;
    Fail(ErrorCode::kInfeasibleAlignment, std::string(utt_id) + ": " + e.what());
  }
  return SilencesFromDurations(candidates, DurationsFromPath(path, mask.size(), mask),
                               min_sil_frames);
}

FinalAlignment FinalizeAlignment(const frontend::TokenSequence &candidates,
                                 const std::vector<int> &durations,
                                 int min_sil_frames) {
  FinalAlignment out;
  out.sil_flags = SilencesFromDurations(candidates, durations, min_sil_frames);
  out.tokens.language_id = candidates.language_id;
  std::size_t next_boundary = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const bool at_boundary = next_boundary < candidates.boundaries.size() &&
                             static_cast<std::size_t>(candidates.boundaries[next_boundary]) == i;
    if (at_boundary) {
      out.tokens.boundaries.push_back(static_cast<int>(out.tokens.size()));
    }
    if (candidates.IsSil(i)) {
      const bool keep = at_boundary && out.sil_flags[next_boundary];
      if (keep) {
        out.tokens.tokens.push_back(candidates.tokens[i]);
        out.durations.push_back(durations[i]);
      } else if (!out.durations.empty()) {
        out.durations.back() += durations[i];
      } else if (durations[i] != 0) {
        Fail(ErrorCode::kInvalidArgument, "leading <sil> with frames");
      }
    } else {
      out.tokens.tokens.push_back(candidates.tokens[i]);
      out.durations.push_back(durations[i]);
    }
    if (at_boundary) ++next_boundary;
  }
  return out;
}

std::vector<corpus::CtmEntry> ToCtm(const frontend::TokenSequence &tokens,
                                    const std::vector<int> &durations) {
  if (durations.size() != tokens.size()) {
    Fail(ErrorCode::kShapeMismatch, "durations do not match token count");
  }
  std::vector<corpus::CtmEntry> ctm;
  int start = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    ctm.push_back({tokens.tokens[i], start, durations[i]});
    start += durations[i];
  }
  return ctm;
}

}  // namespace vqtts::alignment
