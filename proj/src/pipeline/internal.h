// src/pipeline/internal.h

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

#ifndef VQTTS_PIPELINE_INTERNAL_H_
#define VQTTS_PIPELINE_INTERNAL_H_

#include <filesystem>
#include <string>

#include "vqtts/base/text.h"
#include "vqtts/nn/optim.h"
#include "vqtts/pipeline/pipeline.h"

namespace vqtts::pipeline::internal {

// Contents of a marker file, or empty when it does not exist.
std::string ReadMarker(const std::filesystem::path &path);
void WriteMarker(const std::filesystem::path &path, const std::string &hash);

// Feeds the raw bytes of a file to `h`. Throws Io when it cannot be read.
void HashFile(Fnv1a &h, const std::filesystem::path &path);
std::string ReadFileBytes(const std::filesystem::path &path);

// Canonical text of one config section, prefixed by its name.
std::string SectionText(const Config &c, const std::string &section);

// Hash recorded by an upstream stage; throws InvalidArgument naming the
// stage to run when it has not completed.
std::string RequireMarker(const PipelineConfig &cfg, const std::string &stage);

// Newest step<N> under `root`; throws Io naming `stage` when there is none.
std::filesystem::path RequireCheckpoint(const std::filesystem::path &root,
                                        const std::string &stage);

// Round-trip decimal text of a double.
std::string FormatDouble(double v);

nn::AdamOptions AdamFromConfig(const Config &section, nn::AdamOptions def);

}  // namespace vqtts::pipeline::internal

#endif  // VQTTS_PIPELINE_INTERNAL_H_
