// tests/acceptance.cc

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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. `--only N` runs a single criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "grad_check.h"
#include "oracles.h"
#include "toy_am.h"
#include "vqtts/alignment/mas.h"
#include "vqtts/corpus/audio.h"
#include "vqtts/corpus/corpus.h"
#include "vqtts/frontend/sil_predictor.h"
#include "vqtts/pipeline/pipeline.h"
#include "vqtts/selection/selection.h"
#include "vqtts/synthesis/synthesis.h"
#include "vqtts/toy/sil_rule_corpus.h"
#include "vqtts/toy/synthetic_corpus.h"
#include "vqtts/txt2vec/acoustic_model.h"

#ifndef VQTTS_CLI_PATH
#error "VQTTS_CLI_PATH must name the vqtts executable"
#endif

using namespace vqtts;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void Require(bool ok, const std::string &what) {
    if (!ok && pass) {
      pass = false;
      detail.str("");
      detail << what;
    }
  }
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path ScratchDir(const std::string &name) {
  const fs::path p =
      fs::temp_directory_path() / ("vqtts_acceptance_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void CerAgainstOracle(Outcome &o) {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  const std::string alphabet = "abcdefgh";
  auto draw = [&] {
    std::string s;
    for (int n = 1 + static_cast<int>(rng() % 40); n > 0; --n) {
      s += alphabet[rng() % alphabet.size()];
    }
    return s;
  };
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::string ref = draw(), hyp = draw();
    const double expect =
        static_cast<double>(testing::EditDistanceOracle(ref, hyp)) / ref.size();
    worst = std::max(worst, std::abs(selection::Cer(ref, hyp) - expect));
  }
  const double secs = Seconds(start);
  o.detail << "1000 pairs, max |diff| " << worst << ", " << secs << " s";
  o.Require(worst == 0.0, "cer differs from the oracle by " + std::to_string(worst));
  o.Require(secs < 5.0, "took " + std::to_string(secs) + " s");
}

void MasAgainstBruteForce(Outcome &o) {
  const auto start = Clock::now();
  std::mt19937_64 rng(202);
  std::normal_distribution<double> g(0.0, 2.0);
  int same_path = 0, with_skip = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const int S = 1 + static_cast<int>(rng() % 4);
    const auto skip = testing::RandomSkipMask(S, rng);
    const int required = static_cast<int>(std::count(skip.begin(), skip.end(), false));
    const int T = required + static_cast<int>(rng() % (9 - required));
    alignment::ScoreMatrix sc;
    sc.logp = MatrixD(T, S);
    for (double &v : sc.logp.data()) v = g(rng);
    const auto brute = testing::BruteForceMas(sc.logp, skip);
    const auto path = alignment::MasViterbi(sc, skip);
    worst = std::max(worst, std::abs(path.loglik - brute.score));
    same_path += path.token_of_frame == brute.path;
    with_skip += required < S;
  }
  const double secs = Seconds(start);
  o.detail << "500 matrices (" << with_skip << " with skippable tokens), same path " << same_path
           << ", max |dscore| " << worst << ", " << secs << " s";
  o.Require(worst <= 1e-9, "score differs by " + std::to_string(worst));
  o.Require(same_path == 500, std::to_string(500 - same_path) + " paths differ");
  o.Require(secs < 30.0, "took " + std::to_string(secs) + " s");
}

void SelectionAgainstOracle(Outcome &o) {
  const auto start = Clock::now();
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int agree = 0, over_budget = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    std::vector<selection::SelectionMetrics> ms;
    std::vector<testing::OracleUtt> ou;
    for (int i = 0; i < n; ++i) {
      selection::SelectionMetrics m{"u" + std::to_string(i), "spk", 0.5 * u(rng), -5.0 * u(rng),
                                    0.2 + 0.8 * u(rng), 1000.0 + 9000.0 * u(rng)};
      if (i > 0 && rng() % 4 == 0) {  // exact score ties
        m.cer = ms.back().cer;
        m.norm_loglik = ms.back().norm_loglik;
      }
      if (rng() % 4 == 0) m.focus_rate = 0.25 * static_cast<double>(1 + rng() % 4);
      ms.push_back(m);
      ou.push_back({m.utt_id, m.cer, m.norm_loglik, m.focus_rate, m.duration_s});
    }
    const auto report = selection::SelectTrainingSet(ms, nullptr);
    const auto [ids1, ids2] = testing::TwoStageOracle(ou, 36000.0, 18000.0);
    const auto &sel = report.at("spk");
    agree += sel.stage1_ids == ids1 && sel.stage2_ids == ids2;
    double sum1 = 0.0, sum2 = 0.0;
    for (const auto &m : ms) {
      if (std::count(sel.stage1_ids.begin(), sel.stage1_ids.end(), m.utt_id)) sum1 += m.duration_s;
      if (std::count(sel.stage2_ids.begin(), sel.stage2_ids.end(), m.utt_id)) sum2 += m.duration_s;
    }
    over_budget += sum1 > 36000.0 || sum2 > 18000.0;
  }
  const double secs = Seconds(start);
  o.detail << "200 instances, " << agree << " agree, " << over_budget << " over budget, " << secs
           << " s";
  o.Require(agree == 200, std::to_string(200 - agree) + " instances differ from the oracle");
  o.Require(over_budget == 0, "budget exceeded");
  o.Require(secs < 10.0, "took " + std::to_string(secs) + " s");
}

void FocusRateAnchors(Outcome &o) {
  std::mt19937_64 rng(404);
  double worst_uniform = 0.0;
  bool one_hot_exact = true;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t T = 1 + rng() % 40, S = 1 + rng() % 20;
    MatrixD hot(T, S, 0.0);
    for (std::size_t t = 0; t < T; ++t) hot(t, rng() % S) = 1.0;
    one_hot_exact &= alignment::FocusRate(hot) == 1.0;
    const double f = alignment::FocusRate(MatrixD(T, S, 1.0 / static_cast<double>(S)));
    worst_uniform = std::max(worst_uniform, std::abs(f - 1.0 / static_cast<double>(S)));
  }
  o.detail << "one-hot exact " << (one_hot_exact ? "yes" : "no") << ", uniform max |F - 1/S| "
           << worst_uniform;
  o.Require(one_hot_exact, "one-hot attention did not give exactly 1");
  o.Require(worst_uniform <= 1e-12, "uniform attention off by " + std::to_string(worst_uniform));
}

void LengthRegulator(Outcome &o) {
  std::mt19937_64 rng(505);
  int bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int s = std::uniform_int_distribution<int>(1, 30)(rng);
    std::vector<int> d(s);
    for (int &x : d) x = std::uniform_int_distribution<int>(0, 8)(rng);
    d[rng() % s] += 1;
    std::vector<double> v(s);
    std::iota(v.begin(), v.end(), 0.0);
    const nn::Tensor out =
        txt2vec::AcousticModel::LengthRegulate(nn::Tensor::Constant(s, 1, v), d);
    bad += out.rows() != static_cast<std::size_t>(std::accumulate(d.begin(), d.end(), 0));
  }
  o.detail << "1000 duration vectors, " << bad << " length mismatches";
  o.Require(bad == 0, "output frames differ from the duration sum");
}

// Moments of voiced log-pitch, computed in long double.
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

features::SpeakerProfile Profile(const std::string &id, double mu, double sigma) {
  features::SpeakerProfile p;
  p.speaker_id = id;
  p.logf0_mean = mu;
  p.logf0_std = sigma;
  p.n_voiced_frames = 100;
  return p;
}

void PitchRescaleProperties(Outcome &o) {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> hz(60.0, 400.0), mu(std::log(80.0), std::log(300.0)),
      sd(0.05, 0.5), coin(0.0, 1.0);
  double worst_moment = 0.0, worst_round_trip = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 80)(rng);
    MatrixD aux(n, 3, 0.0);
    for (int t = 0; t < n; ++t) {
      aux(t, 0) = t < 2 || coin(rng) >= 0.25 ? hz(rng) : 0.0;
      aux(t, 1) = -3.0;
      aux(t, 2) = aux(t, 0) > 0 ? 0.9 : 0.1;
    }
    if (aux(0, 0) == aux(1, 0)) aux(1, 0) *= 1.1;
    const auto [m, s] = LogMoments(aux);
    const auto src = Profile("s", m, s), tgt = Profile("t", mu(rng), sd(rng));
    const MatrixD out = synthesis::PitchRescale(aux, src, tgt);
    const auto [m2, s2] = LogMoments(out);
    worst_moment = std::max({worst_moment, std::abs(m2 - tgt.logf0_mean),
                             std::abs(s2 - tgt.logf0_std)});
    const MatrixD back = synthesis::PitchRescale(out, tgt, src);
    for (int t = 0; t < n; ++t) {
      worst_round_trip = std::max(worst_round_trip, std::abs(back(t, 0) - aux(t, 0)));
    }
  }
  o.detail << "100 sequences, max moment error " << worst_moment << ", max round-trip error "
           << worst_round_trip << " Hz";
  o.Require(worst_moment <= 1e-6, "moments off by " + std::to_string(worst_moment));
  o.Require(worst_round_trip <= 1e-6, "round trip off by " + std::to_string(worst_round_trip));
}

void GradientCheck(Outcome &o) {
  auto cfg = testing::ToyAmConfig(16);
  cfg.detach_duration = false;
  txt2vec::AcousticModel model(cfg);
  const auto items = testing::ToyAmItems(model.config(), 2, 707);
  std::vector<nn::Tensor> params;
  for (const auto &[name, t] : model.params().params()) params.push_back(t);
  const double err = testing::SampledGradError([&] { return model.Loss(items).total; }, params,
                                               20, 1e-4, 707);
  o.detail << "width 16, 20 parameters, max relative error " << err;
  o.Require(err <= 1e-3, "relative error " + std::to_string(err));
}

// The synthetic corpus with the default acoustic model and vocoder
// architectures.
pipeline::PipelineConfig DefaultArchitectureConfig(const fs::path &root) {
  const Config toy_config = toy::SyntheticPipelineConfig();
  Config c;
  for (const auto &[key, value] : toy_config.values()) {
    if (key.rfind("am.", 0) == 0 || key.rfind("voc.", 0) == 0) continue;
    if (key == "train_am.batch_size" || key == "train_voc.batch_size") continue;
    c.Set(key, value);
  }
  c.Set("voc.mode", "lite");
  c.Set("train_am.max_steps", "50");
  c.Set("train_voc.max_steps", "100");
  c.Save(root / "pipeline.conf");
  return pipeline::PipelineConfig::FromConfig(c, root);
}

void TrainingLowersLoss(Outcome &o) {
  const auto start = Clock::now();
  const fs::path root = ScratchDir("train");
  toy::SyntheticCorpusOptions opts;
  opts.utts_per_speaker = 16;
  const auto corpus = toy::WriteSyntheticCorpus(root, opts);
  const auto cfg = DefaultArchitectureConfig(root);
  pipeline::Prepare(cfg);
  pipeline::Select(cfg);
  const auto am = pipeline::TrainAm(cfg);
  const auto voc = pipeline::TrainVoc(cfg);
  const double secs = Seconds(start);
  o.detail << corpus.utts.size() << " utterances; am " << am.steps << " steps " << am.initial_loss
           << " -> " << am.final_loss << "; voc " << voc.steps << " steps " << voc.initial_loss
           << " -> " << voc.final_loss << "; " << secs << " s";
  o.Require(am.steps == 50 && voc.steps == 100, "wrong number of steps");
  o.Require(am.final_loss < am.initial_loss, "acoustic model loss did not drop");
  o.Require(voc.final_loss < voc.initial_loss, "vocoder loss did not drop");
  o.Require(secs < 600.0, "took " + std::to_string(secs) + " s");
}

std::vector<std::vector<std::string>> ReadTsv(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    rows.push_back(cols);
  }
  return rows;
}

void RunAllEndToEnd(Outcome &o) {
  const fs::path root = ScratchDir("run_all");
  toy::WriteSyntheticCorpus(root, {});
  toy::SyntheticPipelineConfig().Save(root / "pipeline.conf");
  const std::string cmd = std::string("\"") + VQTTS_CLI_PATH + "\" --config \"" +
                          (root / "pipeline.conf").string() + "\" run-all > \"" +
                          (root / "run_all.log").string() + "\" 2>&1";
  const int rc = std::system(cmd.c_str());
  o.Require(rc == 0, "run-all exited with status " + std::to_string(rc));
  if (rc != 0) return;

  const auto registry = corpus::SpeakerRegistry::Load(root / "speakers.tsv");
  const fs::path demo = root / "work" / "demo";
  const auto summary = ReadTsv(demo / "summary.tsv");
  int mono = 0, cross = 0;
  for (std::size_t r = 1; r < summary.size(); ++r) {
    const std::string &lang = summary[r][0], &mode = summary[r][1], &target = summary[r][2];
    const std::string where = lang + "/" + mode + ": ";
    const auto trace = ReadTsv(demo / (lang + "_" + mode + ".trace.tsv"));
    o.Require(trace.size() == 2 && trace[0].size() >= 7, where + "malformed trace");
    if (trace.size() != 2 || trace[1].size() < 7) continue;
    const auto &t = trace[1];
    const std::string &am = t[1], &voc = t[2], &rescaled = t[3];
    const std::size_t T = std::stoul(t[5]), audio_length = std::stoul(t[6]);
    std::size_t sum = 0;
    std::stringstream ds(t[4]);
    for (std::string d; std::getline(ds, d, ',');) sum += std::stoul(d);
    const auto wav = corpus::ReadWav(demo / (lang + "_" + mode + ".wav"));
    o.Require(t[0] == mode, where + "trace mode differs");
    o.Require(voc == target, where + "vocoder speaker is not the target");
    if (mode == "mono") {
      ++mono;
      o.Require(am == voc, where + "am speaker differs from vocoder speaker");
      o.Require(rescaled == "false", where + "pitch rescaled");
    } else {
      ++cross;
      o.Require(am != target, where + "am speaker is the target");
      o.Require(registry.Get(am).language_id == lang, where + "am speaker is not native");
      o.Require(registry.Get(target).language_id != lang, where + "target is native");
      o.Require(rescaled == "true", where + "pitch not rescaled");
    }
    o.Require(sum == T, where + "durations do not sum to T");
    o.Require(audio_length == T * 160 && wav.samples.size() == T * 160,
              where + "output length is not T * hop");
  }
  o.detail << "exit 0, " << mono << " mono and " << cross << " cross demos checked";
  o.Require(mono == 3 && cross == 3, "expected 3 mono and 3 cross demos");
}

void SilencePredictorAccuracy(Outcome &o) {
  const auto data = toy::MakeSilRuleCorpus(200, 808);
  std::vector<frontend::TokenSequence> seqs;
  for (const auto &ex : data) seqs.push_back(ex.tokens);
  auto model = frontend::SilPredictor::ForData(frontend::SilPredictorConfig{}, seqs);
  const frontend::SilTrainOptions opts;
  const auto r = frontend::TrainSilPredictor(model, data, opts);
  o.detail << opts.epochs << " epochs, training accuracy " << r.train_accuracy;
  o.Require(r.train_accuracy >= 0.95, "accuracy " + std::to_string(r.train_accuracy));
}

struct Criterion {
  int id;
  const char *name;
  std::function<void(Outcome &)> run;
};

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  app.add_option("--only", only, "Run one criterion (1-10)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "cer matches the edit-distance oracle", CerAgainstOracle},
      {2, "alignment search matches brute force", MasAgainstBruteForce},
      {3, "two-stage selection matches the oracle", SelectionAgainstOracle},
      {4, "focus rate anchors", FocusRateAnchors},
      {5, "length regulator frame count", LengthRegulator},
      {6, "pitch rescale moments and round trip", PitchRescaleProperties},
      {7, "acoustic model gradient check", GradientCheck},
      {8, "acoustic model and vocoder losses drop", TrainingLowersLoss},
      {9, "run-all routing and output lengths", RunAllEndToEnd},
      {10, "silence predictor accuracy", SilencePredictorAccuracy},
  };
  int failed = 0;
  for (const Criterion &c : criteria) {
    if (only != 0 && c.id != only) continue;
    Outcome o;
    try {
      c.run(o);
    } catch (const std::exception &e) {
      o.pass = false;
      o.detail.str("");
      o.detail << "exception: " << e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " ("
              << o.detail.str() << ")" << std::endl;
  }
  fs::remove_all(fs::temp_directory_path() / ("vqtts_acceptance_" + std::to_string(::getpid())));
  return failed == 0 ? 0 : 1;
}
