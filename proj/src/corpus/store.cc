// src/corpus/store.cc

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

#include "vqtts/corpus/store.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include "vqtts/base/error.h"
#include "vqtts/base/text.h"

namespace vqtts::corpus {
namespace fs = std::filesystem;

namespace {

void PutU32(std::string &s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t GetU32(const unsigned char *p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::string Header(const char magic[4], std::size_t rows, std::size_t cols) {
  std::string s(magic, 4);
  PutU32(s, kFeatureFileVersion);
  PutU32(s, static_cast<std::uint32_t>(rows));
  PutU32(s, static_cast<std::uint32_t>(cols));
  return s;
}

void WriteAll(const fs::path &path, const std::string &bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

// Returns the payload after validating magic, version and size.
std::vector<unsigned char> ReadPayload(const fs::path &path, const char magic[4],
                                       std::size_t &rows, std::size_t &cols) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot read " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), {});
  if (buf.size() < 16 || std::memcmp(buf.data(), magic, 4) != 0) {
    Fail(ErrorCode::kIo, path.string() + ": bad feature-file magic");
  }
  if (GetU32(buf.data() + 4) != kFeatureFileVersion) {
    Fail(ErrorCode::kIo, path.string() + ": unsupported version");
  }
  rows = GetU32(buf.data() + 8);
  cols = GetU32(buf.data() + 12);
  if (buf.size() != 16 + rows * cols * 4) {
    Fail(ErrorCode::kIo, path.string() + ": payload size does not match header");
  }
  return {buf.begin() + 16, buf.end()};
}

}  // namespace

void WriteInt32File(const fs::path &path, const char magic[4], const MatrixI &m) {
  std::string s = Header(magic, m.rows(), m.cols());
  for (int v : m.data()) PutU32(s, static_cast<std::uint32_t>(v));
  WriteAll(path, s);
}

MatrixI ReadInt32File(const fs::path &path, const char magic[4]) {
  std::size_t rows, cols;
  const auto payload = ReadPayload(path, magic, rows, cols);
  MatrixI m(rows, cols);
  for (std::size_t i = 0; i < rows * cols; ++i) {
    m.data()[i] = static_cast<std::int32_t>(GetU32(payload.data() + 4 * i));
  }
  return m;
}

void WriteFloat32File(const fs::path &path, const char magic[4],
                      const MatrixD &m) {
  std::string s = Header(magic, m.rows(), m.cols());
  for (double v : m.data()) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    PutU32(s, bits);
  }
  WriteAll(path, s);
}

MatrixD ReadFloat32File(const fs::path &path, const char magic[4]) {
  std::size_t rows, cols;
  const auto payload = ReadPayload(path, magic, rows, cols);
  MatrixD m(rows, cols);
  for (std::size_t i = 0; i < rows * cols; ++i) {
    const std::uint32_t bits = GetU32(payload.data() + 4 * i);
    float f;
    std::memcpy(&f, &bits, 4);
    m.data()[i] = f;
  }
  return m;
}

void WriteCtm(const fs::path &path, const std::vector<CtmEntry> &entries) {
  std::ostringstream os;
  for (const CtmEntry &e : entries) {
    os << e.token << ' ' << e.start_frame << ' ' << e.n_frames << '\n';
  }
  WriteAll(path, os.str());
}

std::vector<CtmEntry> ReadCtm(const fs::path &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kMissingAlignment, "cannot read " + path.string());
  std::vector<CtmEntry> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    std::istringstream ls(line);
    CtmEntry e;
    if (!(ls >> e.token >> e.start_frame >> e.n_frames) || e.n_frames < 0 ||
        e.start_frame < 0) {
      Fail(ErrorCode::kMalformedRecord,
           path.string() + ":" + std::to_string(line_no));
    }
    out.push_back(std::move(e));
  }
  return out;
}

MatrixI FeatureStore::ReadVq(const std::string &utt_id) const {
  return ReadInt32File(VqPath(utt_id), kVqMagic);
}
MatrixD FeatureStore::ReadAux(const std::string &utt_id) const {
  return ReadFloat32File(AuxPath(utt_id), kAuxMagic);
}
std::vector<double> FeatureStore::ReadSpk(const std::string &utt_id) const {
  return ReadFloat32File(SpkPath(utt_id), kSpkMagic).data();
}
std::vector<CtmEntry> FeatureStore::ReadAlignment(const std::string &utt_id) const {
  return ReadCtm(CtmPath(utt_id));
}
std::string FeatureStore::ReadHyp(const std::string &utt_id) const {
  std::ifstream in(HypPath(utt_id));
  if (!in) Fail(ErrorCode::kIo, "cannot read " + HypPath(utt_id).string());
  std::string line;
  std::getline(in, line);
  return line;
}

void FeatureStore::WriteVq(const std::string &utt_id, const MatrixI &vq) const {
  WriteInt32File(VqPath(utt_id), kVqMagic, vq);
}
void FeatureStore::WriteAux(const std::string &utt_id, const MatrixD &aux) const {
  WriteFloat32File(AuxPath(utt_id), kAuxMagic, aux);
}
void FeatureStore::WriteSpk(const std::string &utt_id,
                            const std::vector<double> &emb) const {
  WriteFloat32File(SpkPath(utt_id), kSpkMagic, MatrixD(1, emb.size(), emb));
}
void FeatureStore::WriteAlignment(const std::string &utt_id,
                                  const std::vector<CtmEntry> &ctm) const {
  WriteCtm(CtmPath(utt_id), ctm);
}
void FeatureStore::WriteHyp(const std::string &utt_id, const std::string &hyp) const {
  WriteAll(HypPath(utt_id), hyp + "\n");
}

}  // namespace vqtts::corpus
