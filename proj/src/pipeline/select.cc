// src/pipeline/select.cc

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

#include <map>

#include "internal.h"
#include "vqtts/base/error.h"
#include "vqtts/base/log.h"
#include "vqtts/corpus/store.h"
#include "vqtts/pipeline/pipeline.h"

namespace vqtts::pipeline {
namespace fs = std::filesystem;

SelectSummary Select(const PipelineConfig &cfg) {
  const std::string upstream = internal::RequireMarker(cfg, "prepare");
  Fnv1a h;
  h.Update(upstream);
  h.Update(internal::SectionText(cfg.raw, "select"));
  const std::string hash = h.HexDigest();

  const auto registry = corpus::SpeakerRegistry::Load(cfg.RegistryPath());
  const auto utts = corpus::LoadManifest(cfg.manifest, &registry);
  const auto aligned = ReadAlignMetrics(cfg.AlignMetricsPath());
  std::map<std::string, const UtteranceAlignment *> by_id;
  for (const auto &a : aligned) by_id[a.utt_id] = &a;

  const corpus::FeatureStore store(cfg.store);
  std::vector<selection::SelectionMetrics> metrics;
  for (const corpus::Utterance &u : utts) {
    auto it = by_id.find(u.utt_id);
    if (it == by_id.end()) {
      Fail(ErrorCode::kMissingAlignment, "no alignment metrics for " + u.utt_id);
    }
    selection::SelectionMetrics m;
    m.utt_id = u.utt_id;
    m.speaker_id = u.speaker_id;
    try {
      m.cer = selection::Cer(u.transcript, store.ReadHyp(u.utt_id));
    } catch (const Error &e) {
      Fail(e.code(), "utterance " + u.utt_id + ": " + e.what());
    }
    m.norm_loglik = it->second->norm_loglik;
    m.focus_rate = it->second->focus_rate;
    m.duration_s = u.duration_s;
    metrics.push_back(m);
  }

  SelectSummary summary;
  summary.report = selection::SelectTrainingSet(metrics, &registry, cfg.selection);
  const fs::path marker = cfg.MarkerPath("select");
  if (internal::ReadMarker(marker) == hash && fs::exists(cfg.ReportPath())) {
    summary.up_to_date = true;
    LogLine("select").kv("status", "up_to_date");
    return summary;
  }
  fs::remove(marker);
  selection::WriteSelectionReport(cfg.ReportPath(), summary.report);

  fs::remove_all(cfg.SelectedDir());
  fs::create_directories(cfg.SelectedDir());
  std::size_t selected = 0;
  for (const auto &[spk, sel] : summary.report) {
    std::map<std::string, bool> chosen;
    for (const auto &id : sel.stage2_ids) chosen[id] = true;
    std::vector<corpus::Utterance> subset;
    for (const corpus::Utterance &u : utts) {
      if (chosen.count(u.utt_id)) subset.push_back(u);
    }
    selected += subset.size();
    corpus::SaveManifest(cfg.SelectedDir() / (spk + ".tsv"), subset);
    LogLine("select")
        .kv("speaker", spk)
        .kv("stage1", sel.stage1_ids.size())
        .kv("stage2", sel.stage2_ids.size())
        .kv("stage2_s", sel.stage2_seconds);
  }
  internal::WriteMarker(marker, hash);
  LogLine("select").kv("status", "done").kv("utts", utts.size()).kv("selected", selected);
  return summary;
}

std::vector<corpus::Utterance> TrainingSet(const PipelineConfig &cfg) {
  internal::RequireMarker(cfg, "select");
  const auto registry = corpus::SpeakerRegistry::Load(cfg.RegistryPath());
  std::vector<corpus::Utterance> out;
  for (const std::string &spk : registry.Speakers()) {
    const fs::path path = cfg.SelectedDir() / (spk + ".tsv");
    if (!fs::exists(path)) continue;
    for (auto &u : corpus::LoadManifest(path, &registry)) out.push_back(std::move(u));
  }
  return out;
}

}  // namespace vqtts::pipeline
