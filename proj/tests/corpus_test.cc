// tests/corpus_test.cc

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

#include <cmath>
#include <functional>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "vqtts/base/error.h"
#include "vqtts/corpus/audio.h"
#include "vqtts/corpus/corpus.h"
#include "vqtts/corpus/store.h"

using namespace vqtts;
using namespace vqtts::corpus;
namespace fs = std::filesystem;

namespace {

ErrorCode CodeOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

fs::path TempDir(const std::string &name) {
  fs::path p = fs::temp_directory_path() / ("vqtts_corpus_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const char *kTwoLines =
    "u1\tspeaker=mr_f\tlang=mr\taudio=wav/u1.wav\tsr=16000\tdur=2.5\ttext=room one two open\n"
    "u2\tspeaker=hi_m\tlang=hi\taudio=wav/u2.wav\tsr=16000\tdur=3.01\ttext=नमस्ते दुनिया\n";

}  // namespace

TEST_CASE("normalize_transcript examples") {
  CHECK(NormalizeTranscript("room {one two} open") == "room one two open");
  CHECK(NormalizeTranscript("no braces here") == "no braces here");
  CHECK(CodeOf([] { NormalizeTranscript("call 42"); }) == ErrorCode::kDigitOutsideBraces);
  CHECK(CodeOf([] { NormalizeTranscript("a {b"); }) == ErrorCode::kUnbalancedBraces);
  CHECK(CodeOf([] { NormalizeTranscript("a }b"); }) == ErrorCode::kUnbalancedBraces);
  CHECK(CodeOf([] { NormalizeTranscript("{a {b}}"); }) == ErrorCode::kUnbalancedBraces);
  // Devanagari digit is still a digit.
  CHECK(CodeOf([] { NormalizeTranscript("पृष्ठ ४"); }) == ErrorCode::kDigitOutsideBraces);
  // Unicode whitespace (NBSP, ideographic space, tab) collapses to one space.
  CHECK(NormalizeTranscript("  a 　b\t c  ") == "a b c");
}

TEST_CASE("normalize_transcript is idempotent where it succeeds") {
  const std::vector<std::string> alphabet{"a", "b", " ", "{", "}", "\t", " ",
                                          "क", "ा", "7", "x"};
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(0, 20);
  int successes = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    std::string s;
    for (int i = len(rng); i > 0; --i) s += alphabet[pick(rng)];
    std::string once;
    try {
      once = NormalizeTranscript(s);
    } catch (const Error &) {
      continue;
    }
    ++successes;
    CHECK(NormalizeTranscript(once) == once);
    CHECK(once.find_first_of("{}0123456789") == std::string::npos);
  }
  CHECK(successes > 100);
}

TEST_CASE("manifest parsing") {
  CHECK(ParseManifest("").empty());
  const auto utts = ParseManifest(kTwoLines);
  REQUIRE(utts.size() == 2);
  CHECK(utts[0].utt_id == "u1");
  CHECK(utts[0].sample_rate == 16000);
  CHECK(utts[1].duration_s == 3.01);
  CHECK(utts[1].transcript == "नमस्ते दुनिया");
  CHECK(FormatManifest(utts) == kTwoLines);

  const fs::path dir = TempDir("manifest");
  SaveManifest(dir / "m.tsv", utts);
  CHECK(LoadManifest(dir / "m.tsv") == utts);

  // Braced digits in the manifest are normalized on load.
  const auto braced = ParseManifest(
      "u9\tspeaker=s\tlang=mr\taudio=a.wav\tsr=16000\tdur=1\ttext=page {four}\n");
  CHECK(braced[0].transcript == "page four");
}

TEST_CASE("manifest errors") {
  try {
    ParseManifest("u1\tspeaker=s\tlang=mr\tsr=16000\tdur=1\ttext=a\n");
    FAIL("expected MalformedRecord");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kMalformedRecord);
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    CHECK(std::string(e.what()).find("audio") != std::string::npos);
  }
  CHECK(CodeOf([] {
          ParseManifest("\nu1\tspeaker=s\tlang=mr\taudio=a\tsr=x\tdur=1\ttext=a\n");
        }) == ErrorCode::kMalformedRecord);
  CHECK(CodeOf([] {
          ParseManifest("u1\tspeaker=s\tlang=mr\taudio=a\tsr=1\tdur=-1\ttext=a\n");
        }) == ErrorCode::kMalformedRecord);
  CHECK(CodeOf([] {
          ParseManifest("u1\tspeaker=s\tlang=mr\taudio=a\tsr=1\tdur=1\ttext=call 42\n");
        }) == ErrorCode::kMalformedRecord);
  CHECK(CodeOf([] {
          ParseManifest(std::string(kTwoLines) +
                        "u1\tspeaker=mr_f\tlang=mr\taudio=a\tsr=1\tdur=1\ttext=a\n");
        }) == ErrorCode::kDuplicateUttId);
  SpeakerRegistry reg;
  reg.Add("mr_f", {"mr", std::string("f")});
  CHECK(CodeOf([&] { ParseManifest(kTwoLines, &reg); }) == ErrorCode::kUnknownSpeaker);
  CHECK(CodeOf([] {
          ParseManifest(
              "a\tspeaker=s\tlang=mr\taudio=a\tsr=1\tdur=1\ttext=x\n"
              "b\tspeaker=s\tlang=hi\taudio=a\tsr=1\tdur=1\ttext=x\n");
        }) == ErrorCode::kInconsistentRegistry);
}

TEST_CASE("speaker registry") {
  const auto utts = ParseManifest(kTwoLines);
  SpeakerRegistry reg = SpeakerRegistry::FromUtterances(utts);
  CHECK(reg.Languages() == std::vector<std::string>{"hi", "mr"});
  CHECK(reg.NativeSpeakers("mr") == std::vector<std::string>{"mr_f"});
  const fs::path dir = TempDir("registry");
  reg.Add("te_m", {"te", std::string("m")});
  reg.Save(dir / "speakers.tsv");
  CHECK(SpeakerRegistry::Load(dir / "speakers.tsv").entries() == reg.entries());
  CHECK(CodeOf([&] { reg.Get("nobody"); }) == ErrorCode::kUnknownSpeaker);
}

TEST_CASE("wav round trip and rejection of other encodings") {
  const fs::path dir = TempDir("wav");
  Waveform w;
  w.sample_rate = 16000;
  for (int i = 0; i < 1000; ++i) w.samples.push_back(std::sin(i * 0.05) * 0.8);
  WriteWav(dir / "a.wav", w);
  const Waveform r = ReadWav(dir / "a.wav");
  CHECK(r.sample_rate == 16000);
  REQUIRE(r.samples.size() == 1000);
  for (std::size_t i = 0; i < 1000; ++i) CHECK(std::abs(r.samples[i] - w.samples[i]) < 1e-4);

  // Patch the header to claim 8-bit stereo.
  std::string bytes;
  {
    std::ifstream in(dir / "a.wav", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  std::string stereo = bytes;
  stereo[22] = 2;
  std::ofstream(dir / "b.wav", std::ios::binary) << stereo;
  CHECK(CodeOf([&] { ReadWav(dir / "b.wav"); }) == ErrorCode::kUnsupportedAudio);
  std::string eight = bytes;
  eight[34] = 8;
  std::ofstream(dir / "c.wav", std::ios::binary) << eight;
  CHECK(CodeOf([&] { ReadWav(dir / "c.wav"); }) == ErrorCode::kUnsupportedAudio);
  std::ofstream(dir / "d.wav", std::ios::binary) << "not audio";
  CHECK(CodeOf([&] { ReadWav(dir / "d.wav"); }) == ErrorCode::kUnsupportedAudio);
}

TEST_CASE("feature store files carry the documented header") {
  const fs::path dir = TempDir("store");
  FeatureStore store(dir);
  MatrixI vq(3, 2, std::vector<int>{1, 2, 3, 4, 5, 319});
  store.WriteVq("u1", vq);
  CHECK(store.ReadVq("u1") == vq);
  {
    std::ifstream in(store.VqPath("u1"), std::ios::binary);
    std::vector<unsigned char> b((std::istreambuf_iterator<char>(in)), {});
    REQUIRE(b.size() == 16 + 6 * 4);
    CHECK(std::string(b.begin(), b.begin() + 4) == "VQIX");
    CHECK(b[4] == 1);
    CHECK(b[8] == 3);
    CHECK(b[12] == 2);
    CHECK(b[16 + 5 * 4] == 0x3f);  // 319 little-endian low byte
    CHECK(b[16 + 5 * 4 + 1] == 0x01);
  }
  MatrixD aux(2, 3, std::vector<double>{200.0, -3.5, 0.9, 0.0, -11.5, 0.1});
  store.WriteAux("u1", aux);
  const MatrixD back = store.ReadAux("u1");
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(back.data()[i] == doctest::Approx(aux.data()[i]).epsilon(1e-7));
  }
  store.WriteSpk("u1", {0.6, 0.8});
  CHECK(store.ReadSpk("u1").size() == 2);
  CHECK(CodeOf([&] { ReadFloat32File(store.VqPath("u1"), kAuxMagic); }) == ErrorCode::kIo);

  const std::vector<CtmEntry> ctm{{"a", 0, 3}, {"<sil>", 3, 4}, {"b", 7, 2}};
  store.WriteAlignment("u1", ctm);
  CHECK(store.ReadAlignment("u1") == ctm);
  store.WriteHyp("u1", "hello world");
  CHECK(store.ReadHyp("u1") == "hello world");
}
