// tests/synthesis_test.cc

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
#include <random>

#include "doctest.h"
#include "toy_am.h"
#include "toy_voc.h"
#include "vqtts/base/error.h"
#include "vqtts/synthesis/synthesis.h"

using namespace vqtts;
using namespace vqtts::synthesis;
using features::SpeakerProfile;

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

SpeakerProfile Prof(const std::string &id, double mu, double sigma, std::vector<double> emb = {}) {
  SpeakerProfile p;
  p.speaker_id = id;
  p.logf0_mean = mu;
  p.logf0_std = sigma;
  p.n_voiced_frames = 100;
  p.embedding = std::move(emb);
  return p;
}

MatrixD Voiced(const std::vector<double> &hz) {
  MatrixD aux(hz.size(), 3, 0.0);
  for (std::size_t t = 0; t < hz.size(); ++t) {
    aux(t, 0) = hz[t];
    aux(t, 1) = -2.0 - 0.1 * static_cast<double>(t);
    aux(t, 2) = hz[t] > 0 ? 0.9 : 0.1;
  }
  return aux;
}

// Independent moments of voiced log-pitch.
std::pair<double, double> LogMoments(const MatrixD &aux) {
  long double s = 0, n = 0;
  for (std::size_t t = 0; t < aux.rows(); ++t) {
    if (aux(t, 0) > 0) s += std::log(static_cast<long double>(aux(t, 0))), n += 1;
  }
  const long double mean = s / n;
  long double v = 0;
  for (std::size_t t = 0; t < aux.rows(); ++t) {
    if (aux(t, 0) > 0) v += std::pow(std::log(static_cast<long double>(aux(t, 0))) - mean, 2);
  }
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(v / n))};
}

}  // namespace

TEST_CASE("pitch rescale examples") {
  const MatrixD aux = Voiced({120.0, 0.0, 180.0, 240.0});
  const auto same = PitchRescale(aux, Prof("a", 5.0, 0.2), Prof("b", 5.0, 0.2));
  for (std::size_t t = 0; t < 4; ++t) CHECK(same(t, 0) == doctest::Approx(aux(t, 0)).epsilon(1e-12));

  const MatrixD flat = Voiced({100.0, 100.0, 0.0, 100.0});
  const auto shifted = PitchRescale(flat, Prof("a", std::log(100.0), 0.0),
                                    Prof("b", std::log(200.0), 0.25));
  CHECK(shifted(0, 0) == doctest::Approx(200.0).epsilon(1e-12));
  CHECK(shifted(1, 0) == doctest::Approx(200.0).epsilon(1e-12));
  CHECK(shifted(2, 0) == 0.0);
  CHECK(shifted(3, 0) == doctest::Approx(200.0).epsilon(1e-12));

  const MatrixD three = Voiced({100.0, 200.0, 400.0});
  const auto [mu, sd] = LogMoments(three);
  const auto out = PitchRescale(three, Prof("a", mu, sd), Prof("b", std::log(150.0), 0.3));
  const auto [m2, s2] = LogMoments(out);
  CHECK(std::abs(m2 - std::log(150.0)) <= 1e-6);
  CHECK(std::abs(s2 - 0.3) <= 1e-6);
  // Energy and pov untouched.
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(out(t, 1) == three(t, 1));
    CHECK(out(t, 2) == three(t, 2));
  }

  SpeakerProfile missing = Prof("m", 5.0, 0.2);
  missing.n_voiced_frames = 0;
  CHECK(CodeOf([&] { PitchRescale(aux, missing, Prof("b", 5.0, 0.2)); }) ==
        ErrorCode::kMissingStats);
  CHECK(CodeOf([&] { PitchRescale(aux, Prof("b", 5.0, 0.2), missing); }) ==
        ErrorCode::kMissingStats);
  CHECK(CodeOf([&] { PitchRescale(aux, Prof("a", NAN, 0.2), Prof("b", 5.0, 0.2)); }) ==
        ErrorCode::kMissingStats);
}

TEST_CASE("pitch rescale properties over random sequences") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> hz(60.0, 400.0), mu(std::log(80.0), std::log(300.0)),
      sd(0.05, 0.5), coin(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 60)(rng);
    std::vector<double> p(n);
    for (double &x : p) x = coin(rng) < 0.25 ? 0.0 : hz(rng);
    p[0] = hz(rng);
    p[1] = p[0] * 1.3;
    const MatrixD aux = Voiced(p);
    const auto [m, s] = LogMoments(aux);
    const SpeakerProfile src = Prof("s", m, s), tgt = Prof("t", mu(rng), sd(rng));
    const MatrixD out = PitchRescale(aux, src, tgt);
    const auto [m2, s2] = LogMoments(out);
    CHECK(std::abs(m2 - tgt.logf0_mean) <= 1e-6);
    CHECK(std::abs(s2 - tgt.logf0_std) <= 1e-6);
    const MatrixD back = PitchRescale(out, tgt, src);
    for (int t = 0; t < n; ++t) {
      CHECK((out(t, 0) > 0) == (aux(t, 0) > 0));
      CHECK(std::abs(back(t, 0) - aux(t, 0)) <= 1e-6);
    }
  }
}

TEST_CASE("choose native speaker") {
  corpus::SpeakerRegistry reg;
  reg.Add("hi_f", {"hi", std::nullopt});
  reg.Add("te_a", {"te", std::nullopt});
  reg.Add("te_b", {"te", std::nullopt});
  reg.Add("te_c", {"te", std::nullopt});
  ProfileMap prof{{"hi_f", Prof("hi_f", std::log(200.0), 0.2)},
                  {"te_a", Prof("te_a", std::log(110.0), 0.2)},
                  {"te_b", Prof("te_b", std::log(210.0), 0.2)},
                  {"te_c", Prof("te_c", std::log(210.0), 0.3)}};
  const auto &target = prof.at("hi_f");
  CHECK(ChooseNativeSpeaker("hi", target, reg, prof) == "hi_f");
  // te_b and te_c tie at ln 210; the smaller id wins.
  CHECK(ChooseNativeSpeaker("te", target, reg, prof) == "te_b");
  CHECK(ChooseNativeSpeaker("te", target, reg, prof, std::string("te_a")) == "te_a");
  CHECK(CodeOf([&] { ChooseNativeSpeaker("te", target, reg, prof, std::string("hi_f")); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { ChooseNativeSpeaker("te", target, reg, prof, std::string("zz")); }) ==
        ErrorCode::kUnknownSpeaker);
  CHECK(CodeOf([&] { ChooseNativeSpeaker("mr", target, reg, prof); }) ==
        ErrorCode::kNoNativeSpeaker);
  prof.erase("te_a");
  CHECK(CodeOf([&] { ChooseNativeSpeaker("te", target, reg, prof); }) ==
        ErrorCode::kInconsistentRegistry);
}

namespace {

struct PlainFrontend : TextFrontend {
  frontend::TokenSequence Process(const std::string &text,
                                  const std::string &lang) const override {
    return frontend::Tokenize(text, lang);
  }
};

// Records the embedding it is given and returns fixed features whose pitch
// is constant so the rescale is observable.
struct SpyAm : AcousticBackend {
  mutable std::vector<double> seen;
  txt2vec::AcousticInference Infer(const frontend::TokenSequence &tokens,
                                   const std::vector<double> &spk,
                                   const std::string &) const override {
    seen = spk;
    txt2vec::AcousticInference out;
    out.durations.assign(tokens.size(), 2);
    const std::size_t t = 2 * tokens.size();
    out.vq = MatrixI(t, 2, 1);
    out.aux = MatrixD(t, 3, 0.0);
    for (std::size_t f = 0; f < t; ++f) out.aux(f, 0) = 100.0, out.aux(f, 2) = 0.9;
    return out;
  }
};

struct SpyVoc : VocoderBackend {
  mutable std::vector<double> seen;
  mutable MatrixD aux;
  std::vector<double> Generate(const MatrixI &vq, const MatrixD &a,
                               const std::vector<double> &spk) const override {
    seen = spk;
    aux = a;
    return std::vector<double>(vq.rows() * hop(), 0.0);
  }
  std::size_t hop() const override { return 10; }
};

corpus::SpeakerRegistry Reg() {
  corpus::SpeakerRegistry reg;
  reg.Add("hi_spk", {"hi", std::nullopt});
  reg.Add("te_low", {"te", std::nullopt});
  reg.Add("te_high", {"te", std::nullopt});
  return reg;
}

ProfileMap Profiles(std::size_t dim) {
  ProfileMap p;
  const auto emb = [dim](int k) {
    std::vector<double> e(dim, 0.0);
    e[k % dim] = 1.0;
    return e;
  };
  p["hi_spk"] = Prof("hi_spk", std::log(200.0), 0.2, emb(0));
  p["te_low"] = Prof("te_low", std::log(100.0), 0.1, emb(1));
  p["te_high"] = Prof("te_high", std::log(190.0), 0.15, emb(2));
  return p;
}

}  // namespace

TEST_CASE("routing with spy backends") {
  const auto reg = Reg();
  const auto prof = Profiles(4);
  PlainFrontend fe;
  SpyAm am;
  SpyVoc voc;

  const auto mono = Synthesize({"ab cd", "hi_spk", "hi", std::nullopt}, fe, am, voc, prof, reg);
  CHECK(mono.trace.mode == SynthesisMode::kMono);
  CHECK(mono.trace.am_speaker_id == "hi_spk");
  CHECK(mono.trace.voc_speaker_id == "hi_spk");
  CHECK_FALSE(mono.trace.pitch_rescaled);
  CHECK(am.seen == prof.at("hi_spk").embedding);
  CHECK(voc.seen == prof.at("hi_spk").embedding);
  CHECK(voc.aux(0, 0) == 100.0);
  CHECK(mono.trace.frames == 8);
  CHECK(mono.trace.audio_length == 80);

  const auto cross = Synthesize({"ab cd", "hi_spk", "te", std::nullopt}, fe, am, voc, prof, reg);
  CHECK(cross.trace.mode == SynthesisMode::kCross);
  CHECK(cross.trace.am_speaker_id == "te_high");
  CHECK(cross.trace.voc_speaker_id == "hi_spk");
  CHECK(cross.trace.pitch_rescaled);
  // The target embedding reaches only the vocoder.
  CHECK(am.seen == prof.at("te_high").embedding);
  CHECK(voc.seen == prof.at("hi_spk").embedding);
  const double expect =
      std::exp((std::log(100.0) - std::log(190.0)) / 0.15 * 0.2 + std::log(200.0));
  CHECK(voc.aux(0, 0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(cross.trace.audio_length == cross.trace.frames * 10);

  const auto forced =
      Synthesize({"ab", "hi_spk", "te", std::string("te_low")}, fe, am, voc, prof, reg);
  CHECK(forced.trace.am_speaker_id == "te_low");
  CHECK(am.seen == prof.at("te_low").embedding);

  CHECK(CodeOf([&] { Synthesize({"ab", "nobody", "hi", {}}, fe, am, voc, prof, reg); }) ==
        ErrorCode::kUnknownSpeaker);
  CHECK(CodeOf([&] { Synthesize({"ab", "hi_spk", "ta", {}}, fe, am, voc, prof, reg); }) ==
        ErrorCode::kUnknownLanguage);
  auto partial = prof;
  partial.erase("hi_spk");
  CHECK(CodeOf([&] { Synthesize({"ab", "hi_spk", "hi", {}}, fe, am, voc, partial, reg); }) ==
        ErrorCode::kInconsistentRegistry);
}

TEST_CASE("mono path equals calling the models by hand") {
  auto am_cfg = testing::ToyAmConfig();
  am_cfg.languages = {"hi", "te"};
  txt2vec::AcousticModel am(am_cfg);
  auto voc_cfg = testing::ToyVocConfig();
  voc_cfg.spk_dim = 8;
  vec2wav::Vocoder voc(voc_cfg);
  const auto prof = Profiles(8);
  const auto reg = Reg();
  PlainFrontend fe;
  ModelAcousticBackend amb(am);
  ModelVocoderBackend vocb(voc);

  const auto r = Synthesize({"abc da", "te_low", "te", {}}, fe, amb, vocb, prof, reg);
  const auto tokens = frontend::Tokenize("abc da", "te");
  const auto inf = am.Infer(tokens, prof.at("te_low").embedding, "te");
  const auto wave = voc.Generate(inf.vq, inf.aux, prof.at("te_low").embedding);
  CHECK(r.waveform == wave);
  CHECK(r.trace.durations == inf.durations);
  CHECK(r.trace.audio_length == r.trace.frames * voc_cfg.hop);

  const auto c = Synthesize({"abc da", "te_low", "hi", {}}, fe, amb, vocb, prof, reg);
  CHECK(c.trace.am_speaker_id == "hi_spk");
  CHECK(c.waveform.size() == c.trace.frames * voc_cfg.hop);
}

TEST_CASE("trace format") {
  SynthesisTrace t;
  t.mode = SynthesisMode::kCross;
  t.am_speaker_id = "a";
  t.voc_speaker_id = "b";
  t.pitch_rescaled = true;
  t.durations = {2, 0, 3};
  t.frames = 5;
  t.audio_length = 800;
  CHECK(FormatTrace(t) ==
        "mode\tam_speaker_id\tvoc_speaker_id\tpitch_rescaled\tdurations\tT\taudio_length\n"
        "cross\ta\tb\ttrue\t2,0,3\t5\t800\n");
}
