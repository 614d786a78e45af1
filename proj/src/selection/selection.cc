// src/selection/selection.cc

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

#include "vqtts/selection/selection.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "vqtts/base/error.h"
#include "vqtts/base/text.h"

namespace vqtts::selection {
namespace {

std::vector<double> ZScores(const std::vector<double> &x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  std::vector<double> z(x.size(), 0.0);
  if (sd > 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - mean) / sd;
  }
  return z;
}

std::string Num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::size_t EditDistance(const std::vector<char32_t> &a, const std::vector<char32_t> &b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] != b[j - 1]);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double Cer(std::string_view ref, std::string_view hyp) {
  const auto r = DecodeUtf8(CollapseWhitespace(ref));
  if (r.empty()) Fail(ErrorCode::kEmptyReference, "empty CER reference");
  const auto h = DecodeUtf8(CollapseWhitespace(hyp));
  return static_cast<double>(EditDistance(r, h)) / static_cast<double>(r.size());
}

std::vector<double> Stage1Scores(const std::vector<SelectionMetrics> &metrics,
                                 double cer_weight) {
  if (metrics.empty()) return {};
  std::vector<double> ll, cer;
  for (const auto &m : metrics) {
    ll.push_back(m.norm_loglik);
    cer.push_back(m.cer);
  }
  const auto zl = ZScores(ll), zc = ZScores(cer);
  std::vector<double> score(metrics.size());
  for (std::size_t i = 0; i < score.size(); ++i) {
    // Scores are kept on a 1e-9 grid: exact ties such as z = +1 - 1 would
    // otherwise be ordered by rounding residue instead of by utt_id.
    score[i] = std::nearbyint((zl[i] - cer_weight * zc[i]) * 1e9) / 1e9;
  }
  return score;
}

std::vector<SelectionMetrics> RankStage1(std::vector<SelectionMetrics> metrics,
                                         double cer_weight) {
  const auto score = Stage1Scores(metrics, cer_weight);
  std::vector<std::size_t> order(metrics.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return metrics[a].utt_id < metrics[b].utt_id;
  });
  std::vector<SelectionMetrics> out;
  out.reserve(order.size());
  for (std::size_t i : order) out.push_back(std::move(metrics[i]));
  return out;
}

std::vector<SelectionMetrics> RankStage2(std::vector<SelectionMetrics> metrics) {
  std::sort(metrics.begin(), metrics.end(),
            [](const SelectionMetrics &a, const SelectionMetrics &b) {
              if (a.focus_rate != b.focus_rate) return a.focus_rate > b.focus_rate;
              return a.utt_id < b.utt_id;
            });
  return metrics;
}

std::vector<SelectionMetrics> SelectBudget(const std::vector<SelectionMetrics> &ranked,
                                           double budget_s) {
  if (budget_s < 0) Fail(ErrorCode::kInvalidArgument, "negative budget");
  std::vector<SelectionMetrics> out;
  double used = 0.0;
  for (const auto &m : ranked) {
    if (used + m.duration_s <= budget_s) {
      used += m.duration_s;
      out.push_back(m);
    }
  }
  return out;
}

SelectionReport SelectTrainingSet(const std::vector<SelectionMetrics> &metrics,
                                  const corpus::SpeakerRegistry *registry,
                                  const SelectionOptions &opts) {
  if (opts.budget1_s < 0 || opts.budget2_s < 0 || opts.budget2_s > opts.budget1_s) {
    Fail(ErrorCode::kBadConfig, "budgets must satisfy 0 <= budget2 <= budget1");
  }
  SelectionReport report;
  if (registry != nullptr) {
    for (const std::string &spk : registry->Speakers()) report[spk];
  }
  for (const auto &m : metrics) {
    if (registry != nullptr && !registry->Contains(m.speaker_id)) {
      Fail(ErrorCode::kUnknownSpeaker, m.speaker_id + " (utterance " + m.utt_id + ")");
    }
    report[m.speaker_id].metrics.push_back(m);
  }
  for (auto &[spk, sel] : report) {
    const auto stage1 = SelectBudget(RankStage1(sel.metrics, opts.cer_weight), opts.budget1_s);
    const auto stage2 = SelectBudget(RankStage2(stage1), opts.budget2_s);
    for (const auto &m : stage1) {
      sel.stage1_ids.push_back(m.utt_id);
      sel.stage1_seconds += m.duration_s;
    }
    for (const auto &m : stage2) {
      sel.stage2_ids.push_back(m.utt_id);
      sel.stage2_seconds += m.duration_s;
    }
  }
  return report;
}

std::string FormatSelectionReport(const SelectionReport &report) {
  std::ostringstream os;
  os << "speaker\tutt_id\tcer\tnorm_loglik\tfocus_rate\tstage1\tstage2\n";
  for (const auto &[spk, sel] : report) {
    const std::set<std::string> s1(sel.stage1_ids.begin(), sel.stage1_ids.end());
    const std::set<std::string> s2(sel.stage2_ids.begin(), sel.stage2_ids.end());
    for (const auto &m : sel.metrics) {
      os << spk << '\t' << m.utt_id << '\t' << Num(m.cer) << '\t' << Num(m.norm_loglik)
         << '\t' << Num(m.focus_rate) << '\t' << s1.count(m.utt_id) << '\t'
         << s2.count(m.utt_id) << '\n';
    }
  }
  return os.str();
}

void WriteSelectionReport(const std::filesystem::path &path, const SelectionReport &report) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << FormatSelectionReport(report);
}

}  // namespace vqtts::selection
