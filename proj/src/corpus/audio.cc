// src/corpus/audio.cc

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

#include "vqtts/corpus/audio.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "vqtts/base/error.h"

namespace vqtts::corpus {
namespace {

std::uint32_t Le32(const unsigned char *p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t Le16(const unsigned char *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
void Put32(std::string &s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void Put16(std::string &s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>(v >> 8));
}

}  // namespace

Waveform ReadWav(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot read audio " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), {});
  const auto bad = [&](const std::string &why) {
    Fail(ErrorCode::kUnsupportedAudio, path.string() + ": " + why);
  };
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    bad("not a RIFF/WAVE file");
  }
  std::size_t pos = 12;
  bool have_fmt = false;
  Waveform wave;
  while (pos + 8 <= buf.size()) {
    const unsigned char *chunk = buf.data() + pos;
    const std::uint32_t size = Le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > buf.size()) bad("truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) bad("short fmt chunk");
      const std::uint16_t format = Le16(buf.data() + body);
      const std::uint16_t channels = Le16(buf.data() + body + 2);
      const std::uint32_t rate = Le32(buf.data() + body + 4);
      const std::uint16_t bits = Le16(buf.data() + body + 14);
      if (format != 1) bad("only PCM is supported");
      if (channels != 1) bad("only mono is supported");
      if (bits != 16) bad("only 16-bit samples are supported");
      if (rate == 0) bad("zero sample rate");
      wave.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) bad("data chunk before fmt chunk");
      const std::size_t n = size / 2;
      wave.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto v = static_cast<std::int16_t>(Le16(buf.data() + body + 2 * i));
        wave.samples[i] = static_cast<double>(v) / 32768.0;
      }
      return wave;
    }
    pos = body + size + (size & 1);
  }
  bad("no data chunk");
  return wave;
}

void WriteWav(const std::filesystem::path &path, const Waveform &wave) {
  if (wave.sample_rate <= 0) {
    Fail(ErrorCode::kInvalidArgument, "sample rate must be positive");
  }
  const auto n = static_cast<std::uint32_t>(wave.samples.size());
  std::string out;
  out.reserve(44 + 2 * n);
  out += "RIFF";
  Put32(out, 36 + 2 * n);
  out += "WAVEfmt ";
  Put32(out, 16);
  Put16(out, 1);
  Put16(out, 1);
  Put32(out, static_cast<std::uint32_t>(wave.sample_rate));
  Put32(out, static_cast<std::uint32_t>(wave.sample_rate) * 2);
  Put16(out, 2);
  Put16(out, 16);
  out += "data";
  Put32(out, 2 * n);
  for (double s : wave.samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    Put16(out, static_cast<std::uint16_t>(
                   static_cast<std::int16_t>(std::lround(c * 32767.0))));
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) Fail(ErrorCode::kIo, "cannot write audio " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

}  // namespace vqtts::corpus
