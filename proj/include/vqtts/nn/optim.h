// include/vqtts/nn/optim.h

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

#ifndef VQTTS_NN_OPTIM_H_
#define VQTTS_NN_OPTIM_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vqtts/base/config.h"
#include "vqtts/nn/layers.h"

namespace vqtts::nn {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-9;
  double clip_norm = 1.0;  // <= 0 disables global-norm clipping
};

class Adam {
 public:
  Adam(const ParamStore &store, AdamOptions options);

  // Applies one update from the gradients currently held by the parameters.
  // Returns the pre-clipping global gradient norm.
  double Step();
  std::int64_t steps() const { return steps_; }

  void Save(const std::filesystem::path &path) const;
  void Load(const std::filesystem::path &path);

 private:
  const ParamStore *store_;
  AdamOptions options_;
  std::int64_t steps_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

// Checkpoint directory layout: config.txt (echo of the model config),
// params.bin (named tensors), optim.bin (optional optimizer state). Binary
// files end in an FNV-1a checksum over the preceding bytes.
void SaveCheckpoint(const std::filesystem::path &dir, const Config &config,
                    const ParamStore &store, const Adam *optimizer);
Config ReadCheckpointConfig(const std::filesystem::path &dir);
// Overwrites the store's tensors. Names and shapes must match exactly.
void LoadCheckpointParams(const std::filesystem::path &dir, ParamStore &store,
                          Adam *optimizer);
// Highest step<N> subdirectory under `root`, or empty when none.
std::filesystem::path LatestCheckpoint(const std::filesystem::path &root);
std::int64_t CheckpointStep(const std::filesystem::path &dir);

}  // namespace vqtts::nn

#endif  // VQTTS_NN_OPTIM_H_
