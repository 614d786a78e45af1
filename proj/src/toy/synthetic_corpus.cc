// src/toy/synthetic_corpus.cc

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

#include "vqtts/toy/synthetic_corpus.h"

#include <cmath>
#include <numbers>
#include <random>

#include "vqtts/base/error.h"
#include "vqtts/base/text.h"
#include "vqtts/corpus/audio.h"

namespace vqtts::toy {
namespace fs = std::filesystem;

namespace {

struct Voice {
  double f0 = 120.0;
  double tilt = 1.0;   // spectral slope exponent
  double level = 0.2;  // peak amplitude
};

// Spectral peaks for character c of language l.
std::pair<double, double> CharPeaks(int lang, int c) {
  const double f1 = 300.0 + 60.0 * ((c * 7 + lang * 3) % 10);
  const double f2 = 1000.0 + 150.0 * ((c * 3 + lang * 5) % 11);
  return {f1, f2};
}

// Appends one character: a harmonic tone with continuous phase.
void AppendChar(std::vector<double> &out, double &phase, int frames, int hop,
                int sr, const Voice &voice, int lang, int c, double contour,
                std::mt19937_64 &rng) {
  const auto [f1, f2] = CharPeaks(lang, c);
  const double f0 = voice.f0 * contour * (1.0 + 0.015 * ((c % 5) - 2));
  std::vector<double> amps;
  for (int k = 1; k * f0 < 0.45 * sr; ++k) {
    const double f = k * f0;
    double a = std::exp(-std::pow((f - f1) / 180.0, 2)) +
               0.7 * std::exp(-std::pow((f - f2) / 260.0, 2)) + 0.02;
    a *= std::pow(f / 500.0, -voice.tilt * 0.5);
    amps.push_back(a);
  }
  double norm = 0.0;
  for (double a : amps) norm += a;
  const std::size_t n = static_cast<std::size_t>(frames) * hop;
  const std::size_t ramp = std::min<std::size_t>(64, n / 4);
  std::normal_distribution<double> noise(0.0, 1e-3);
  const double step = 2.0 * std::numbers::pi * f0 / sr;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < amps.size(); ++k) {
      s += amps[k] * std::sin((k + 1) * phase);
    }
    double env = 1.0;
    if (i < ramp) env = static_cast<double>(i + 1) / ramp;
    if (n - i <= ramp) env = std::min(env, static_cast<double>(n - i) / ramp);
    out.push_back(voice.level * env * s / norm + noise(rng));
    phase = std::fmod(phase + step, 2.0 * std::numbers::pi);
  }
}

void AppendPause(std::vector<double> &out, int frames, int hop, std::mt19937_64 &rng) {
  std::normal_distribution<double> noise(0.0, 1e-3);
  for (int i = 0; i < frames * hop; ++i) out.push_back(noise(rng));
}

}  // namespace

std::vector<std::string> SyntheticAlphabet(const std::string &language_id) {
  if (language_id == "hi") {
    return {"न", "क", "ख", "ग", "त", "द", "म", "र", "ल", "स"};
  }
  if (language_id == "mr") {
    return {"च", "ज", "ट", "ड", "प", "ब", "य", "व", "श", "ह"};
  }
  if (language_id == "te") {
    return {"న", "క", "గ", "త", "ద", "మ", "ర", "ల", "స", "ప"};
  }
  Fail(ErrorCode::kUnknownLanguage, "no synthetic alphabet for " + language_id);
}

SyntheticCorpus WriteSyntheticCorpus(const fs::path &root,
                                     const SyntheticCorpusOptions &opts) {
  if (opts.languages.empty() || opts.speakers_per_language <= 0 ||
      opts.utts_per_speaker < 0 || opts.hop <= 0 || opts.sample_rate <= 0 ||
      opts.min_duration_s <= 0.0 || opts.max_duration_s < opts.min_duration_s + 0.8) {
    Fail(ErrorCode::kInvalidArgument, "synthetic corpus options");
  }
  std::error_code ec;
  fs::create_directories(root / "wav", ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create " + (root / "wav").string());

  static const double kBaseF0[] = {105.0, 210.0, 120.0, 195.0, 95.0, 230.0,
                                   140.0, 175.0};
  std::mt19937_64 rng(opts.seed);
  SyntheticCorpus out;
  const double frames_per_s = static_cast<double>(opts.sample_rate) / opts.hop;
  // A word adds at most 30 pause frames plus 4 characters of 12 frames.
  const double max_target_s = opts.max_duration_s - 78.0 / frames_per_s;
  int voice_index = 0;
  for (std::size_t l = 0; l < opts.languages.size(); ++l) {
    const std::string &lang = opts.languages[l];
    const auto alphabet = SyntheticAlphabet(lang);
    const int n_letters = static_cast<int>(alphabet.size());
    for (int s = 0; s < opts.speakers_per_language; ++s, ++voice_index) {
      const std::string spk = lang + "_spk" + std::to_string(s + 1);
      Voice voice;
      voice.f0 = kBaseF0[voice_index % 8] * (1.0 + 0.02 * (voice_index / 8));
      voice.tilt = 0.5 + 0.3 * (voice_index % 4);
      voice.level = 0.15 + 0.04 * (voice_index % 3);
      out.speaker_f0[spk] = voice.f0;
      out.registry.Add(spk, {lang, {}});
      for (int u = 0; u < opts.utts_per_speaker; ++u) {
        std::uniform_real_distribution<double> target_dist(opts.min_duration_s,
                                                           std::max(opts.min_duration_s, max_target_s));
        std::uniform_int_distribution<int> word_len(2, 4), char_frames(7, 12),
            pause_frames(20, 30), letter(0, n_letters - 1), other(1, n_letters - 1);
        std::bernoulli_distribution ends_in_pause(0.35);
        const double target_frames = target_dist(rng) * frames_per_s;
        std::vector<double> samples;
        std::string text;
        double phase = 0.0;
        int frames = 0;
        bool pause_pending = false;
        while (frames < target_frames) {
          if (!text.empty()) {
            text += ' ';
            if (pause_pending) {
              const int p = pause_frames(rng);
              AppendPause(samples, p, opts.hop, rng);
              frames += p;
            }
          }
          const int len = word_len(rng);
          const bool pause_word = ends_in_pause(rng);
          for (int i = 0; i < len; ++i) {
            const int c = (i + 1 == len && pause_word) ? 0 : (i + 1 == len ? other(rng) : letter(rng));
            text += alphabet[c];
            const int f = char_frames(rng);
            const double contour = 1.0 + 0.06 * std::sin(std::numbers::pi * (i + 0.5) / len);
            AppendChar(samples, phase, f, opts.hop, opts.sample_rate, voice,
                       static_cast<int>(l), c, contour, rng);
            frames += f;
          }
          pause_pending = pause_word;
        }
        corpus::Utterance utt;
        char id[16];
        std::snprintf(id, sizeof(id), "_%03d", u + 1);
        utt.utt_id = spk + id;
        utt.speaker_id = spk;
        utt.language_id = lang;
        utt.audio_ref = "wav/" + utt.utt_id + ".wav";
        utt.sample_rate = opts.sample_rate;
        utt.duration_s = static_cast<double>(samples.size()) / opts.sample_rate;
        utt.transcript = text;
        corpus::WriteWav(root / utt.audio_ref, {opts.sample_rate, samples});

        std::string hyp = text;
        if (std::bernoulli_distribution(opts.corrupt_fraction)(rng)) {
          std::bernoulli_distribution flip(0.3);
          std::string corrupted;
          for (char32_t cp : DecodeUtf8(text)) {
            if (cp != U' ' && flip(rng)) {
              corrupted += alphabet[letter(rng)];
            } else {
              corrupted += EncodeUtf8(cp);
            }
          }
          hyp = corrupted;
        }
        out.hyps[utt.utt_id] = hyp;
        out.utts.push_back(std::move(utt));
      }
    }
  }
  corpus::SaveManifest(root / "manifest.tsv", out.utts);
  corpus::SaveHypotheses(root / "hyp.tsv", out.hyps);
  out.registry.Save(root / "speakers.tsv");
  return out;
}

Config SyntheticPipelineConfig() {
  return Config::Parse(R"(seed = 1

[paths]
corpus = .
speakers = speakers.tsv
work = work

[prepare]
workers = 4

[quantizer]
groups = 2
codebook_size = 64
iterations = 15

[select]
budget1_s = 40
budget2_s = 30

[silpred]
width = 32
heads = 2
blocks = 1
ffn_width = 64

[train_sil]
epochs = 30
batch_size = 8
lr = 0.003

[am]
width = 64
heads = 2
enc_blocks = 2
dec_blocks = 2
dec_width = 64
ffn_width = 128
dur_width = 64

[train_am]
max_steps = 50
batch_size = 4
lr = 0.001

[voc]
mode = lite
enc_width = 64
enc_blocks = 2
gen_channels = 64
segment_frames = 24

[train_voc]
max_steps = 100
batch_size = 2
lr = 0.001
)");
}

}  // namespace vqtts::toy
