// tools/make_toy_corpus.cc

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

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "vqtts/toy/synthetic_corpus.h"

namespace fs = std::filesystem;

int main(int argc, char **argv) {
  CLI::App app{"Write the synthetic 6-speaker, 3-language corpus and its pipeline config"};
  std::string out;
  vqtts::toy::SyntheticCorpusOptions opts;
  app.add_option("--out", out, "Output directory")->required();
  app.add_option("--seed", opts.seed, "Random seed");
  app.add_option("--utts-per-speaker", opts.utts_per_speaker, "Utterances per speaker");
  CLI11_PARSE(app, argc, argv);
  try {
    const auto corpus = vqtts::toy::WriteSyntheticCorpus(out, opts);
    vqtts::toy::SyntheticPipelineConfig().Save(fs::path(out) / "pipeline.conf");
    std::cout << "wrote " << corpus.utts.size() << " utterances and "
              << (fs::path(out) / "pipeline.conf").string() << '\n';
  } catch (const std::exception &e) {
    std::cerr << "vqtts-make-toy: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
