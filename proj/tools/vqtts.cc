// tools/vqtts.cc

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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "vqtts/base/error.h"
#include "vqtts/pipeline/pipeline.h"

namespace fs = std::filesystem;
using namespace vqtts;

namespace {

struct GlobalFlags {
  std::string config;
  std::optional<std::int64_t> seed;
  std::string store;
};

pipeline::PipelineConfig Resolve(const GlobalFlags &g) {
  fs::path base;
  Config c = pipeline::LoadConfig(g.config.empty() ? std::nullopt
                                                   : std::optional<fs::path>(g.config),
                                  &base);
  if (g.seed) c.Set("seed", std::to_string(*g.seed));
  if (!g.store.empty()) c.Set("paths.store", fs::absolute(g.store).string());
  return pipeline::PipelineConfig::FromConfig(c, base);
}

void AddTrainFlags(CLI::App *cmd, std::optional<std::int64_t> &max_steps, bool &resume) {
  cmd->add_option("--max-steps", max_steps, "Training steps (epochs for train-sil)");
  cmd->add_flag("--resume", resume, "Continue from the newest checkpoint");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Multi-speaker multi-lingual text-to-speech pipeline"};
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_option("--config", g.config, "Config file (default: $VQTTS_CONFIG)");
  app.add_option("--seed", g.seed, "Global random seed");
  app.add_option("--store", g.store, "Feature store directory");

  auto *prepare = app.add_subcommand("prepare", "Extract features and alignments");
  auto *select = app.add_subcommand("select", "Two-stage training data selection");
  pipeline::TrainFlags sil_flags, am_flags, voc_flags;
  auto *train_sil = app.add_subcommand("train-sil", "Train the silence predictor");
  AddTrainFlags(train_sil, sil_flags.max_steps, sil_flags.resume);
  auto *train_am = app.add_subcommand("train-am", "Train the acoustic model");
  AddTrainFlags(train_am, am_flags.max_steps, am_flags.resume);
  auto *train_voc = app.add_subcommand("train-voc", "Train the vocoder");
  AddTrainFlags(train_voc, voc_flags.max_steps, voc_flags.resume);

  auto *synth = app.add_subcommand("synth", "Synthesize one sentence");
  synthesis::SynthesisRequest request;
  std::string native, out_wav, out_trace;
  synth->add_option("--text", request.text, "Input text")->required();
  synth->add_option("--speaker", request.target_speaker_id, "Target speaker")->required();
  synth->add_option("--lang", request.language_id, "Language of the text")->required();
  synth->add_option("--native", native, "Native speaker for the acoustic model (cross-lingual)");
  synth->add_option("--out", out_wav, "Output wav")->required();
  synth->add_option("--trace", out_trace, "Output trace TSV")->required();
  std::optional<double> sil_threshold;
  synth->add_option("--sil-threshold", sil_threshold, "Silence probability threshold")
      ->check(CLI::Range(0.0, 1.0));

  auto *run_all = app.add_subcommand("run-all", "All stages plus demo synthesis");

  CLI11_PARSE(app, argc, argv);

  std::string stage = app.get_subcommands().front()->get_name();
  try {
    pipeline::PipelineConfig cfg = Resolve(g);
    if (*prepare) {
      pipeline::RunStage(stage, [&] { pipeline::Prepare(cfg); });
    } else if (*select) {
      pipeline::RunStage(stage, [&] { pipeline::Select(cfg); });
    } else if (*train_sil) {
      pipeline::RunStage(stage, [&] { pipeline::TrainSil(cfg, sil_flags); });
    } else if (*train_am) {
      pipeline::RunStage(stage, [&] { pipeline::TrainAm(cfg, am_flags); });
    } else if (*train_voc) {
      pipeline::RunStage(stage, [&] { pipeline::TrainVoc(cfg, voc_flags); });
    } else if (*synth) {
      if (!native.empty()) request.native_override = native;
      if (sil_threshold) cfg.sil_threshold = *sil_threshold;
      pipeline::RunStage(stage, [&] { pipeline::Synthesize(cfg, request, out_wav, out_trace); });
    } else if (*run_all) {
      pipeline::RunAll(cfg);
    }
  } catch (const pipeline::StageError &e) {
    std::cerr << "vqtts: stage " << e.stage() << " failed: " << e.message() << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "vqtts: stage " << stage << " failed: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
