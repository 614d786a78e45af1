// include/vqtts/pipeline/pipeline.h

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

#ifndef VQTTS_PIPELINE_PIPELINE_H_
#define VQTTS_PIPELINE_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vqtts/alignment/scorer.h"
#include "vqtts/base/config.h"
#include "vqtts/corpus/corpus.h"
#include "vqtts/features/options.h"
#include "vqtts/features/quantizer.h"
#include "vqtts/frontend/sil_predictor.h"
#include "vqtts/selection/selection.h"
#include "vqtts/synthesis/synthesis.h"
#include "vqtts/txt2vec/acoustic_model.h"
#include "vqtts/vec2wav/vocoder.h"

namespace vqtts::pipeline {

/// Everything a stage needs, resolved from one Config.
///
/// Relative paths are taken against `base_dir` (the directory of the config
/// file). Section names: paths, features, prepare, quantizer, align, select,
/// silpred, train_sil, am, train_am, voc, train_voc, synth.
struct PipelineConfig {
  Config raw;
  std::uint64_t seed = 1;

  std::filesystem::path corpus;    // audio_ref values are relative to this
  std::filesystem::path manifest;
  std::filesystem::path hyps;
  std::filesystem::path speakers;  // empty: registry implied by the manifest
  std::filesystem::path work;
  std::filesystem::path store;
  std::filesystem::path ckpt;

  features::FeatureOptions features;
  features::SurrogateQuantizer::Options quantizer;
  alignment::GaussianScorerOptions scorer;
  int min_sil_frames = 3;
  int workers = 1;
  selection::SelectionOptions selection;
  double sil_threshold = 0.5;

  /// Throws BadConfig on invalid values (budgets must satisfy
  /// 0 < budget2_s <= budget1_s).
  static PipelineConfig FromConfig(const Config &c,
                                   const std::filesystem::path &base_dir = ".");

  /// `section.seed` when given, otherwise the global seed plus `offset`.
  std::uint64_t StageSeed(const std::string &section, std::uint64_t offset) const;

  std::filesystem::path RegistryPath() const { return work / "speakers.tsv"; }
  std::filesystem::path ProfilesPath() const { return work / "profiles.tsv"; }
  std::filesystem::path AlignMetricsPath() const { return work / "align_metrics.tsv"; }
  std::filesystem::path QuantizerDir() const { return work / "quantizer"; }
  std::filesystem::path ReportPath() const { return work / "selection_report.tsv"; }
  std::filesystem::path SelectedDir() const { return work / "selected"; }
  std::filesystem::path SilTargetsPath() const { return work / "sil_targets.tsv"; }
  std::filesystem::path DemoDir() const { return work / "demo"; }
  std::filesystem::path MarkerPath(const std::string &stage) const;
};

/// Reads `path`, else the file named by VQTTS_CONFIG, else returns an empty
/// config. `base_dir` receives the directory relative paths resolve against.
Config LoadConfig(const std::optional<std::filesystem::path> &path,
                  std::filesystem::path *base_dir);

/// A failure attributed to a pipeline stage. what() starts with the stage.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string &message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)), message_(message) {}
  const std::string &stage() const noexcept { return stage_; }
  const std::string &message() const noexcept { return message_; }

 private:
  std::string stage_;
  std::string message_;
};

/// Runs `fn`, rethrowing any exception as a StageError for `stage`.
void RunStage(const std::string &stage, const std::function<void()> &fn);

struct UtteranceAlignment {
  std::string utt_id;
  std::string speaker_id;
  double norm_loglik = 0.0;
  double focus_rate = 0.0;
  int frames = 0;
  int silences = 0;
};

struct PrepareSummary {
  bool up_to_date = false;  // inputs unchanged, nothing was done
  std::size_t utterances = 0;
  std::size_t reused = 0;   // utterances whose per-utterance marker matched
  std::string hash;
};

/// Feature store population: per utterance aux, speaker embedding,
/// alignment and hypothesis, then the quantizer fit and VQ indices, speaker
/// profiles, align_metrics.tsv and the completion marker. Errors name the
/// first failing utterance (manifest order) and the step that failed.
PrepareSummary Prepare(const PipelineConfig &cfg);

std::vector<UtteranceAlignment> ReadAlignMetrics(const std::filesystem::path &path);

struct SelectSummary {
  bool up_to_date = false;
  selection::SelectionReport report;
};

/// CER against the recognizer hypothesis, alignment metrics and durations
/// feed the two-stage selection; writes selection_report.tsv and one
/// stage-2 manifest per speaker under selected/.
SelectSummary Select(const PipelineConfig &cfg);

/// Stage-2 utterances of every speaker, speakers in sorted order.
std::vector<corpus::Utterance> TrainingSet(const PipelineConfig &cfg);

struct TrainFlags {
  std::optional<std::int64_t> max_steps;  // overrides the config value
  bool resume = false;
};

struct TrainSummary {
  bool up_to_date = false;
  std::filesystem::path checkpoint;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::int64_t steps = 0;
  double accuracy = 0.0;  // silence predictor only
};

/// Silence predictor on sil_targets.tsv derived from the alignments.
/// `max_steps` caps the number of epochs.
TrainSummary TrainSil(const PipelineConfig &cfg, const TrainFlags &flags = {});

/// Model configs as the training stages build them from the pipeline
/// config and the prepared data.
txt2vec::AcousticModelConfig AcousticConfigFor(const PipelineConfig &cfg);
vec2wav::VocoderConfig VocoderConfigFor(const PipelineConfig &cfg);

std::vector<txt2vec::AcousticItem> AcousticItemsFor(const PipelineConfig &cfg,
                                                    const txt2vec::AcousticModel &model,
                                                    const std::vector<corpus::Utterance> &utts);
std::vector<vec2wav::VocoderItem> VocoderItemsFor(const PipelineConfig &cfg,
                                                  const std::vector<corpus::Utterance> &utts);

TrainSummary TrainAm(const PipelineConfig &cfg, const TrainFlags &flags = {});
TrainSummary TrainVoc(const PipelineConfig &cfg, const TrainFlags &flags = {});

/// Latest checkpoints of the three models plus registry and profiles.
class Synthesizer {
 public:
  explicit Synthesizer(const PipelineConfig &cfg);
  synthesis::SynthesisResult Run(const synthesis::SynthesisRequest &request) const;
  const corpus::SpeakerRegistry &registry() const { return registry_; }
  int sample_rate() const { return voc_.config().sample_rate; }
  std::size_t hop() const { return voc_.config().hop; }

 private:
  corpus::SpeakerRegistry registry_;
  synthesis::ProfileMap profiles_;
  frontend::SilPredictor sil_;
  txt2vec::AcousticModel am_;
  vec2wav::Vocoder voc_;
  double sil_threshold_;
};

/// Synthesizes one request and writes the waveform (16-bit PCM) and trace.
synthesis::SynthesisResult Synthesize(const PipelineConfig &cfg,
                                      const synthesis::SynthesisRequest &request,
                                      const std::filesystem::path &wav_path,
                                      const std::filesystem::path &trace_path);

struct DemoResult {
  std::string language_id;
  std::string target_speaker_id;
  synthesis::SynthesisTrace trace;
  std::size_t waveform_length = 0;
  std::filesystem::path wav_path;
  std::filesystem::path trace_path;
};

/// Throws StageError("demo") unless the trace obeys the routing rules of
/// its mode and the waveform holds exactly T * hop samples.
void CheckDemo(const DemoResult &demo, const corpus::SpeakerRegistry &registry,
               std::size_t hop);

/// prepare, select, train-sil, train-am, train-voc, then one mono and one
/// cross synthesis per language under demo/. Throws StageError.
std::vector<DemoResult> RunAll(const PipelineConfig &cfg);

}  // namespace vqtts::pipeline

#endif  // VQTTS_PIPELINE_PIPELINE_H_
