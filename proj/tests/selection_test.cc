// tests/selection_test.cc

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

#include <algorithm>
#include "vqtts/base/text.h"
#include <random>

#include "doctest.h"
#include "oracles.h"
#include "vqtts/base/error.h"
#include "vqtts/selection/selection.h"

using namespace vqtts;
using namespace vqtts::selection;

namespace {

SelectionMetrics M(std::string id, double cer, double ll, double focus, double dur,
                   std::string spk = "s") {
  return {std::move(id), std::move(spk), cer, ll, focus, dur};
}

std::vector<std::string> Ids(const std::vector<SelectionMetrics> &v) {
  std::vector<std::string> out;
  for (const auto &m : v) out.push_back(m.utt_id);
  return out;
}

std::vector<SelectionMetrics> RandomSpeaker(std::mt19937_64 &rng, const std::string &spk,
                                            int n) {
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> coarse(0, 3);
  std::vector<SelectionMetrics> out;
  for (int i = 0; i < n; ++i) {
    SelectionMetrics m = M(spk + "_u" + std::to_string(rng() % 1000) + "_" + std::to_string(i),
                           u(rng) * 0.5, -5 * u(rng), 0.2 + 0.8 * u(rng),
                           1000 + 9000 * u(rng), spk);
    // Exact score ties come from repeated (cer, loglik) pairs; different
    // pairs with mathematically equal scores would depend on rounding.
    if (!out.empty() && rng() % 3 == 0) {
      const auto &prev = out[rng() % out.size()];
      m.cer = prev.cer;
      m.norm_loglik = prev.norm_loglik;
    }
    if (rng() % 3 == 0) m.focus_rate = 0.25 * (1 + coarse(rng));
    out.push_back(m);
  }
  return out;
}

}  // namespace

TEST_CASE("cer examples") {
  CHECK(Cer("abc", "abc") == 0.0);
  CHECK(Cer("abc", "axc") == doctest::Approx(1.0 / 3));
  CHECK(Cer("ab", "abxy") == 1.0);
  CHECK(Cer("a b", "ab") == doctest::Approx(1.0 / 3));
  CHECK(Cer("नमस्ते", "नमस्ते") == 0.0);
  CHECK_THROWS_AS(Cer("  ", "x"), Error);
}

TEST_CASE("cer equals the full-table oracle") {
  std::mt19937_64 rng(1);
  const std::string alphabet = "abcdefg ";
  for (int trial = 0; trial < 500; ++trial) {
    auto draw = [&] {
      std::string s;
      for (int n = 1 + rng() % 40; n > 0; --n) s += alphabet[rng() % alphabet.size()];
      return s;
    };
    const std::string a = draw(), b = draw();
    const auto ua = DecodeUtf8(a), ub = DecodeUtf8(b);
    CHECK(EditDistance(ua, ub) == testing::EditDistanceOracle(a, b));
  }
}

TEST_CASE("rank_stage1") {
  std::vector<SelectionMetrics> same{M("c", 0.1, -1, 1, 1), M("a", 0.1, -1, 1, 1),
                                     M("b", 0.1, -1, 1, 1)};
  CHECK(Ids(RankStage1(same)) == std::vector<std::string>{"a", "b", "c"});
  std::vector<SelectionMetrics> dom{M("x", 0.3, -3, 1, 1), M("best", 0.0, -1, 1, 1),
                                    M("y", 0.2, -2.5, 1, 1)};
  CHECK(RankStage1(dom).front().utt_id == "best");

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    auto ms = RandomSpeaker(rng, "s", 20);
    for (auto &m : ms) m.norm_loglik += 1e-3 * static_cast<double>(rng() % 1000);
    const auto base = Ids(RankStage1(ms));
    const double a = 0.5 + (rng() % 100) / 10.0, b = -20.0 + rng() % 40;
    for (auto &m : ms) m.norm_loglik = a * m.norm_loglik + b;
    CHECK(Ids(RankStage1(ms)) == base);
  }
}

TEST_CASE("select_budget") {
  std::vector<SelectionMetrics> six;
  for (int i = 0; i < 6; ++i) six.push_back(M("u" + std::to_string(i), 0, 0, 1, 3600));
  CHECK(Ids(SelectBudget(six, 10800)) == std::vector<std::string>{"u0", "u1", "u2"});
  std::vector<SelectionMetrics> r{M("a", 0, 0, 1, 4000), M("b", 0, 0, 1, 5000),
                                  M("c", 0, 0, 1, 3000)};
  CHECK(Ids(SelectBudget(r, 8000)) == std::vector<std::string>{"a", "c"});
  CHECK(SelectBudget(r, 0).empty());
}

TEST_CASE("select_training_set against the two-stage oracle") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + rng() % 12;
    const auto ms = RandomSpeaker(rng, "spk", n);
    const auto report = SelectTrainingSet(ms, nullptr);
    std::vector<testing::OracleUtt> ou;
    for (const auto &m : ms) ou.push_back({m.utt_id, m.cer, m.norm_loglik, m.focus_rate, m.duration_s});
    const auto [o1, o2] = testing::TwoStageOracle(ou, kDefaultBudget1, kDefaultBudget2);
    const auto &sel = report.at("spk");
    CHECK(sel.stage1_ids == o1);
    CHECK(sel.stage2_ids == o2);
    CHECK(sel.stage1_seconds <= kDefaultBudget1);
    CHECK(sel.stage2_seconds <= kDefaultBudget2);
    for (const auto &id : sel.stage2_ids) {
      CHECK(std::find(sel.stage1_ids.begin(), sel.stage1_ids.end(), id) != sel.stage1_ids.end());
    }
  }
}

TEST_CASE("speakers are selected independently") {
  std::mt19937_64 rng(4);
  const auto a = RandomSpeaker(rng, "A", 10), b = RandomSpeaker(rng, "B", 10);
  std::vector<SelectionMetrics> mixed;
  for (int i = 0; i < 10; ++i) {
    mixed.push_back(b[i]);
    mixed.push_back(a[i]);
  }
  const auto both = SelectTrainingSet(mixed, nullptr);
  CHECK(both.at("A").stage2_ids == SelectTrainingSet(a, nullptr).at("A").stage2_ids);
  CHECK(both.at("B").stage1_ids == SelectTrainingSet(b, nullptr).at("B").stage1_ids);

  // Small speaker: everything fits.
  std::vector<SelectionMetrics> small{M("x", 0.1, -1, 0.5, 100), M("y", 0.2, -2, 0.9, 200)};
  const auto r = SelectTrainingSet(small, nullptr);
  CHECK(r.at("s").stage1_ids.size() == 2);
  CHECK(r.at("s").stage2_ids.size() == 2);

  corpus::SpeakerRegistry reg;
  reg.Add("s", {"mr", {}});
  reg.Add("empty", {"hi", {}});
  const auto with_reg = SelectTrainingSet(small, &reg);
  CHECK(with_reg.at("empty").stage1_ids.empty());
  CHECK_THROWS_AS(SelectTrainingSet({M("z", 0, 0, 1, 1, "ghost")}, &reg), Error);

  // Byte-identical report for identical inputs.
  CHECK(FormatSelectionReport(SelectTrainingSet(mixed, nullptr)) ==
        FormatSelectionReport(both));
  const std::string tsv = FormatSelectionReport(r);
  CHECK(tsv.rfind("speaker\tutt_id\tcer\tnorm_loglik\tfocus_rate\tstage1\tstage2\n", 0) == 0);
  CHECK(tsv.find("s\tx\t0.1\t-1\t0.5\t1\t1\n") != std::string::npos);
}
