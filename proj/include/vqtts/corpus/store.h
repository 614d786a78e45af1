// include/vqtts/corpus/store.h

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

#ifndef VQTTS_CORPUS_STORE_H_
#define VQTTS_CORPUS_STORE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vqtts/base/matrix.h"

namespace vqtts::corpus {

// Binary feature files: 16-byte little-endian header
//   magic[4] version:u32 rows:u32 cols:u32
// followed by rows*cols little-endian int32 or float32 values.
inline constexpr char kVqMagic[4] = {'V', 'Q', 'I', 'X'};
inline constexpr char kAuxMagic[4] = {'A', 'U', 'X', 'F'};
inline constexpr char kSpkMagic[4] = {'S', 'P', 'K', 'F'};
inline constexpr std::uint32_t kFeatureFileVersion = 1;

void WriteInt32File(const std::filesystem::path &path, const char magic[4],
                    const MatrixI &m);
MatrixI ReadInt32File(const std::filesystem::path &path, const char magic[4]);
void WriteFloat32File(const std::filesystem::path &path, const char magic[4],
                      const MatrixD &m);
MatrixD ReadFloat32File(const std::filesystem::path &path, const char magic[4]);

/// One `align.ctm` row: `<token> <start_frame> <n_frames>`.
struct CtmEntry {
  std::string token;
  int start_frame = 0;
  int n_frames = 0;

  bool operator==(const CtmEntry &) const = default;
};

void WriteCtm(const std::filesystem::path &path,
              const std::vector<CtmEntry> &entries);
std::vector<CtmEntry> ReadCtm(const std::filesystem::path &path);

// store/<utt_id>/{vq.idx, aux.f32, spk.f32, align.ctm, hyp.txt}
class FeatureStore {
 public:
  explicit FeatureStore(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path &root() const { return root_; }
  std::filesystem::path UttDir(const std::string &utt_id) const {
    return root_ / utt_id;
  }
  std::filesystem::path VqPath(const std::string &utt_id) const {
    return UttDir(utt_id) / "vq.idx";
  }
  std::filesystem::path AuxPath(const std::string &utt_id) const {
    return UttDir(utt_id) / "aux.f32";
  }
  std::filesystem::path SpkPath(const std::string &utt_id) const {
    return UttDir(utt_id) / "spk.f32";
  }
  std::filesystem::path CtmPath(const std::string &utt_id) const {
    return UttDir(utt_id) / "align.ctm";
  }
  std::filesystem::path HypPath(const std::string &utt_id) const {
    return UttDir(utt_id) / "hyp.txt";
  }

  MatrixI ReadVq(const std::string &utt_id) const;
  MatrixD ReadAux(const std::string &utt_id) const;
  std::vector<double> ReadSpk(const std::string &utt_id) const;
  std::vector<CtmEntry> ReadAlignment(const std::string &utt_id) const;
  std::string ReadHyp(const std::string &utt_id) const;

  void WriteVq(const std::string &utt_id, const MatrixI &vq) const;
  void WriteAux(const std::string &utt_id, const MatrixD &aux) const;
  void WriteSpk(const std::string &utt_id, const std::vector<double> &emb) const;
  void WriteAlignment(const std::string &utt_id,
                      const std::vector<CtmEntry> &ctm) const;
  void WriteHyp(const std::string &utt_id, const std::string &hyp) const;

 private:
  std::filesystem::path root_;
};

}  // namespace vqtts::corpus

#endif  // VQTTS_CORPUS_STORE_H_
