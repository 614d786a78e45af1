// src/features/speaker.cc

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

#include "vqtts/features/speaker.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vqtts/base/error.h"
#include "vqtts/base/text.h"
#include "vqtts/dsp/mel.h"
#include "vqtts/features/aux.h"

namespace vqtts::features {
namespace {

std::string Num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double ParseNum(const std::string &s, const std::string &where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    Fail(ErrorCode::kMalformedRecord, where + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<double> SurrogateSpeakerEmbedding(const std::vector<double> &samples,
                                              const FeatureOptions &opts) {
  dsp::MelOptions mo = opts.Mel();
  mo.n_mels = opts.spk_dim / 2;
  const MatrixD mel = dsp::LogMel(samples, mo);
  if (mel.rows() == 0) Fail(ErrorCode::kTooShort, "no frames for a speaker embedding");
  const std::size_t B = mel.cols();
  std::vector<double> emb(2 * B, 0.0);
  for (std::size_t t = 0; t < mel.rows(); ++t) {
    for (std::size_t b = 0; b < B; ++b) emb[b] += mel(t, b);
  }
  for (std::size_t b = 0; b < B; ++b) emb[b] /= mel.rows();
  for (std::size_t t = 0; t < mel.rows(); ++t) {
    for (std::size_t b = 0; b < B; ++b) emb[B + b] += (mel(t, b) - emb[b]) * (mel(t, b) - emb[b]);
  }
  for (std::size_t b = 0; b < B; ++b) emb[B + b] = std::sqrt(emb[B + b] / mel.rows());
  double norm = 0.0;
  for (double v : emb) norm += v * v;
  norm = std::sqrt(norm);
  if (norm < 1e-12) Fail(ErrorCode::kDegenerateEmbedding, "zero speaker embedding");
  for (double &v : emb) v /= norm;
  return emb;
}

SpeakerProfile BuildSpeakerProfile(const std::string &speaker_id,
                                   const std::vector<std::vector<double>> &embeddings,
                                   const std::vector<MatrixD> &aux) {
  if (embeddings.empty()) Fail(ErrorCode::kDegenerateEmbedding, speaker_id + ": no embeddings");
  const std::size_t D = embeddings[0].size();
  std::vector<double> mean(D, 0.0);
  for (const auto &e : embeddings) {
    if (e.size() != D) Fail(ErrorCode::kShapeMismatch, speaker_id + ": embedding sizes differ");
    for (std::size_t i = 0; i < D; ++i) mean[i] += e[i];
  }
  double norm = 0.0;
  for (double &v : mean) {
    v /= static_cast<double>(embeddings.size());
    norm += v * v;
  }
  norm = std::sqrt(norm);
  if (norm < 1e-8) {
    Fail(ErrorCode::kDegenerateEmbedding, speaker_id + ": mean embedding has norm " + Num(norm));
  }
  SpeakerProfile p;
  p.speaker_id = speaker_id;
  p.embedding = mean;
  for (double &v : p.embedding) v /= norm;

  double sum = 0.0;
  int n = 0;
  for (const MatrixD &a : aux) {
    for (std::size_t t = 0; t < a.rows(); ++t) {
      if (a(t, kPitchHz) > 0) {
        sum += std::log(a(t, kPitchHz));
        ++n;
      }
    }
  }
  if (n == 0) Fail(ErrorCode::kNoVoicedFrames, speaker_id);
  p.n_voiced_frames = n;
  p.logf0_mean = sum / n;
  double var = 0.0;
  for (const MatrixD &a : aux) {
    for (std::size_t t = 0; t < a.rows(); ++t) {
      if (a(t, kPitchHz) > 0) {
        const double d = std::log(a(t, kPitchHz)) - p.logf0_mean;
        var += d * d;
      }
    }
  }
  p.logf0_std = std::sqrt(var / n);
  return p;
}

void SaveProfiles(const std::filesystem::path &path,
                  const std::map<std::string, SpeakerProfile> &profiles) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto &[id, p] : profiles) {
    out << id << '\t' << Num(p.logf0_mean) << '\t' << Num(p.logf0_std) << '\t'
        << p.n_voiced_frames << '\t';
    for (std::size_t i = 0; i < p.embedding.size(); ++i) out << (i ? "," : "") << Num(p.embedding[i]);
    out << '\n';
  }
}

std::map<std::string, SpeakerProfile> LoadProfiles(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot read " + path.string());
  std::map<std::string, SpeakerProfile> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto f = SplitString(line, '\t');
    if (f.size() != 5) Fail(ErrorCode::kMalformedRecord, where);
    SpeakerProfile p;
    p.speaker_id = f[0];
    p.logf0_mean = ParseNum(f[1], where);
    p.logf0_std = ParseNum(f[2], where);
    p.n_voiced_frames = static_cast<int>(ParseNum(f[3], where));
    for (const std::string &v : SplitString(f[4], ',')) p.embedding.push_back(ParseNum(v, where));
    out[p.speaker_id] = std::move(p);
  }
  return out;
}

}  // namespace vqtts::features
