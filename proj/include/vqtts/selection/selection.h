// include/vqtts/selection/selection.h

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

#ifndef VQTTS_SELECTION_SELECTION_H_
#define VQTTS_SELECTION_SELECTION_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vqtts/corpus/corpus.h"

namespace vqtts::selection {

inline constexpr double kDefaultBudget1 = 36000.0;  // 10 h per speaker
inline constexpr double kDefaultBudget2 = 18000.0;  // 5 h per speaker

struct SelectionMetrics {
  std::string utt_id;
  std::string speaker_id;
  double cer = 0.0;
  double norm_loglik = 0.0;  // nats per frame
  double focus_rate = 1.0;
  double duration_s = 0.0;

  bool operator==(const SelectionMetrics &) const = default;
};

/// Character edit distance (unit costs, spaces count as characters) divided
/// by the reference length in code points. Both strings are whitespace
/// normalized first. Throws EmptyReference.
double Cer(std::string_view ref, std::string_view hyp);

/// Levenshtein distance over code points.
std::size_t EditDistance(const std::vector<char32_t> &a, const std::vector<char32_t> &b);

/// Stage-1 score z(norm_loglik) - cer_weight * z(cer), z over this list with
/// population standard deviation; a zero spread contributes 0. Scores are
/// rounded to multiples of 1e-9.
std::vector<double> Stage1Scores(const std::vector<SelectionMetrics> &metrics,
                                 double cer_weight = 1.0);

/// Descending stage-1 score, ties by utt_id ascending.
std::vector<SelectionMetrics> RankStage1(std::vector<SelectionMetrics> metrics,
                                         double cer_weight = 1.0);

/// Descending focus rate, ties by utt_id ascending.
std::vector<SelectionMetrics> RankStage2(std::vector<SelectionMetrics> metrics);

/// Walks `ranked` in order taking every utterance that still fits.
std::vector<SelectionMetrics> SelectBudget(const std::vector<SelectionMetrics> &ranked,
                                           double budget_s);

struct SpeakerSelection {
  std::vector<std::string> stage1_ids;  // in stage-1 rank order
  std::vector<std::string> stage2_ids;  // in stage-2 rank order
  double stage1_seconds = 0.0;
  double stage2_seconds = 0.0;
  std::vector<SelectionMetrics> metrics;  // input order
};

struct SelectionOptions {
  double budget1_s = kDefaultBudget1;
  double budget2_s = kDefaultBudget2;
  double cer_weight = 1.0;
};

using SelectionReport = std::map<std::string, SpeakerSelection>;

/// Two-stage selection applied to each speaker independently. Speakers in
/// `registry` without metrics get empty selections; metrics from a speaker
/// missing from a given registry raise UnknownSpeaker.
SelectionReport SelectTrainingSet(const std::vector<SelectionMetrics> &metrics,
                                  const corpus::SpeakerRegistry *registry,
                                  const SelectionOptions &opts = {});

/// selection_report.tsv: header, then per utterance
/// speaker utt_id cer norm_loglik focus_rate stage1 stage2.
std::string FormatSelectionReport(const SelectionReport &report);
void WriteSelectionReport(const std::filesystem::path &path, const SelectionReport &report);

}  // namespace vqtts::selection

#endif  // VQTTS_SELECTION_SELECTION_H_
