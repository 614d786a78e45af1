// tests/nn_ops_test.cc

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
#include <fstream>
#include <random>
#include <string>

#include <unistd.h>

#include "doctest.h"
#include "grad_check.h"
#include "vqtts/base/error.h"
#include "vqtts/nn/layers.h"
#include "vqtts/nn/ops.h"
#include "vqtts/nn/optim.h"

using namespace vqtts;
using namespace vqtts::nn;
using vqtts::testing::MaxGradError;

namespace {

Tensor RandomParam(std::size_t r, std::size_t c, std::mt19937_64 &rng,
                   double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  std::vector<double> v(r * c);
  for (double &x : v) x = dist(rng);
  return Tensor::Parameter(r, c, std::move(v));
}

// Contracts an arbitrary tensor to a scalar with fixed random weights so every
// output entry influences the checked gradient differently.
Tensor Project(const Tensor &t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  std::vector<double> w(t.size());
  for (double &x : w) x = dist(rng);
  return Sum(Mul(t, Tensor::Constant(t.rows(), t.cols(), std::move(w))));
}

}  // namespace

TEST_CASE("elementwise and matrix ops have correct gradients") {
  std::mt19937_64 rng(1);
  Tensor a = RandomParam(3, 4, rng);
  Tensor b = RandomParam(4, 5, rng);
  Tensor c = RandomParam(3, 4, rng);
  Tensor d = RandomParam(5, 4, rng);
  Tensor row = RandomParam(1, 4, rng);
  Tensor col = RandomParam(3, 1, rng);

  CHECK(MaxGradError([&] { return Project(MatMul(a, b), 2); }, {a, b}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(MatMulNT(a, d), 3); }, {a, d}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(Transpose(a), 4); }, {a}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(Add(a, c), 5); }, {a, c}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(Sub(a, c), 5); }, {a, c}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(Mul(a, c), 6); }, {a, c}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(AddRowVector(a, row), 7); }, {a, row}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(AddColVector(a, col), 8); }, {a, col}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(Tanh(a), 9); }, {a}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(Sigmoid(a), 9); }, {a}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(Gelu(a), 9); }, {a}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(Exp(a), 9); }, {a}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(Square(a), 9); }, {a}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(LeakyRelu(a, 0.1), 9); }, {a}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(SoftmaxRows(a), 10); }, {a}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(ConcatCols({a, c}), 11); }, {a, c}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(ConcatRows({a, c}), 11); }, {a, c}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(SliceRows(a, 1, 2), 12); }, {a}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(SliceCols(a, 1, 2), 12); }, {a}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(Reshape(a, 2, 6), 12); }, {a}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(RepeatRows(a, {2, 0, 3}), 13); }, {a}) < 1e-6);
}

TEST_CASE("layer norm, embedding and log have correct gradients") {
  std::mt19937_64 rng(2);
  Tensor x = RandomParam(4, 6, rng);
  Tensor g = RandomParam(1, 6, rng);
  Tensor b = RandomParam(1, 6, rng);
  CHECK(MaxGradError([&] { return Project(LayerNormRows(x, g, b), 3); }, {x, g, b}) < 1e-5);

  Tensor table = RandomParam(5, 3, rng);
  CHECK(MaxGradError([&] { return Project(Embedding(table, {4, 0, 4, 2}), 4); },
                     {table}) < 1e-6);

  std::vector<double> pos(12);
  for (double &v : pos) v = 0.5 + std::uniform_real_distribution<double>(0, 2)(rng);
  Tensor p = Tensor::Parameter(3, 4, pos);
  CHECK(MaxGradError([&] { return Project(LogClamped(p, 1e-5), 5); }, {p}) < 1e-6);
}

TEST_CASE("losses have correct gradients and values") {
  std::mt19937_64 rng(3);
  Tensor logits = RandomParam(4, 5, rng);
  const std::vector<int> targets{0, 4, 2, 1};
  const std::vector<double> weights{1.0, 0.0, 0.5, 2.0};
  CHECK(MaxGradError([&] { return CrossEntropySum(logits, targets, weights); },
                     {logits}) < 1e-6);

  // Row 0 only: -log softmax by hand.
  const auto lv = logits.value();
  double z = 0.0;
  for (int j = 0; j < 5; ++j) z += std::exp(lv[j]);
  const double expected = std::log(z) - lv[0];
  CHECK(CrossEntropySum(logits, targets, {1.0, 0.0, 0.0, 0.0}).item() ==
        doctest::Approx(expected).epsilon(1e-12));

  Tensor pred = RandomParam(2, 3, rng);
  const std::vector<double> tgt{0.3, -0.2, 1.0, 2.0, 0.0, -1.0};
  const std::vector<double> w{1, 1, 0, 1, 2, 1};
  CHECK(MaxGradError([&] { return WeightedL1Sum(pred, tgt, w); }, {pred}) < 1e-6);
  CHECK(MaxGradError([&] { return WeightedSquaredSum(pred, tgt, w); }, {pred}) < 1e-6);
  CHECK(WeightedL1Sum(Tensor::Constant(2, 3, tgt), tgt, w).item() == 0.0);
}

TEST_CASE("conv1d, pooling and upsampling have correct gradients") {
  std::mt19937_64 rng(4);
  Tensor x = RandomParam(3, 11, rng);
  Tensor w = RandomParam(2, 3 * 3, rng);
  Tensor bias = RandomParam(2, 1, rng);
  for (const Conv1dSpec spec :
       {Conv1dSpec::Same(3), Conv1dSpec::Same(3, 2),
        Conv1dSpec{3, 2, 1, 1, 1}, Conv1dSpec{3, 3, 2, 0, 0}}) {
    CHECK(MaxGradError([&] { return Project(Conv1d(x, w, bias, spec), 5); },
                       {x, w, bias}) < 1e-6);
  }
  CHECK(MaxGradError([&] { return Project(UpsampleNearest(x, 3), 6); }, {x}) < 1e-6);
  CHECK(MaxGradError([&] { return Project(AvgPool1d(x, 4, 2, 2), 7); }, {x}) < 1e-6);
}

TEST_CASE("conv1d matches a direct convolution") {
  std::mt19937_64 rng(5);
  Tensor x = RandomParam(2, 9, rng);
  Tensor w = RandomParam(3, 2 * 3, rng);
  const Conv1dSpec spec{3, 2, 2, 2, 1};
  Tensor y = Conv1d(x, w, Tensor(), spec);
  REQUIRE(y.cols() == Conv1dOutputLength(9, spec));
  for (std::size_t o = 0; o < 3; ++o) {
    for (std::size_t t = 0; t < y.cols(); ++t) {
      double s = 0.0;
      for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < 3; ++i) {
          const long src = static_cast<long>(t * 2 + i * 2) - 2;
          if (src >= 0 && src < 9) s += w.at(o, c * 3 + i) * x.at(c, src);
        }
      }
      CHECK(y.at(o, t) == doctest::Approx(s).epsilon(1e-12));
    }
  }
}

TEST_CASE("stft magnitude matches a direct DFT and has correct gradients") {
  std::mt19937_64 rng(6);
  Tensor wave = RandomParam(1, 40, rng, 0.5);
  const std::size_t n_fft = 16, hop = 8, win = 12;
  Tensor mag = StftMagnitude(wave, n_fft, hop, win);
  REQUIRE(mag.rows() == 5);
  REQUIRE(mag.cols() == 9);
  // Frame 2 by direct summation.
  const double pi = 3.14159265358979323846;
  const long start = 2 * 8 + 4 - 6;
  for (std::size_t k = 0; k < 9; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < win; ++i) {
      const long src = start + static_cast<long>(i);
      if (src < 0 || src >= 40) continue;
      const double wnd = 0.5 - 0.5 * std::cos(2 * pi * i / win);
      const double v = wave.at(0, src) * wnd;
      const std::size_t n = (n_fft - win) / 2 + i;
      re += v * std::cos(2 * pi * k * n / n_fft);
      im -= v * std::sin(2 * pi * k * n / n_fft);
    }
    CHECK(mag.at(2, k) == doctest::Approx(std::sqrt(re * re + im * im + 1e-9)).epsilon(1e-10));
  }
  CHECK(MaxGradError([&] { return Project(StftMagnitude(wave, n_fft, hop, win), 8); },
                     {wave}) < 1e-5);
}

TEST_CASE("transformer block has correct gradients") {
  ParamStore store(9);
  TransformerBlock block(store, "blk", 8, 2, 16);
  std::mt19937_64 rng(10);
  Tensor x = RandomParam(5, 8, rng);
  std::vector<Tensor> params{x};
  for (const auto &[name, t] : store.params()) params.push_back(t);
  CHECK(MaxGradError([&] { return Project(block(x), 11); }, params) < 1e-5);
}

TEST_CASE("no-grad guard records no tape") {
  std::mt19937_64 rng(12);
  Tensor a = RandomParam(2, 2, rng);
  {
    NoGradGuard guard;
    Tensor y = Tanh(a);
    CHECK_FALSE(y.requires_grad());
  }
  CHECK(Tanh(a).requires_grad());
  CHECK_FALSE(Tanh(Detach(a)).requires_grad());
}

TEST_CASE("adam reduces a quadratic and checkpoints round-trip") {
  ParamStore store(1);
  Tensor w = store.Normal("w", 1, 4, 1.0);
  Adam adam(store, AdamOptions{0.05, 0.9, 0.999, 1e-8, 0.0});
  const std::vector<double> target{1.0, -2.0, 0.5, 3.0};
  const std::vector<double> ones(4, 1.0);
  const double before = WeightedSquaredSum(w, target, ones).item();
  for (int i = 0; i < 300; ++i) {
    store.ZeroGrad();
    Backward(WeightedSquaredSum(w, target, ones));
    adam.Step();
  }
  CHECK(WeightedSquaredSum(w, target, ones).item() < 1e-3 * before);

  const auto dir = std::filesystem::temp_directory_path() /
                   ("vqtts_nn_ckpt_" + std::to_string(::getpid())) / "step300";
  std::filesystem::remove_all(dir.parent_path());
  Config cfg;
  cfg.Set("width", "4");
  SaveCheckpoint(dir, cfg, store, &adam);
  CHECK(LatestCheckpoint(dir.parent_path()) == dir);
  CHECK(ReadCheckpointConfig(dir).GetInt("width", 0) == 4);

  ParamStore other(2);
  Tensor w2 = other.Normal("w", 1, 4, 1.0);
  Adam adam2(other, AdamOptions{});
  LoadCheckpointParams(dir, other, &adam2);
  CHECK(std::equal(w.value().begin(), w.value().end(), w2.value().begin()));
  CHECK(adam2.steps() == 300);

  // Flip one byte: the checksum must catch it.
  {
    std::fstream f(dir / "params.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(20);
    char c = 0x5a;
    f.write(&c, 1);
  }
  CHECK_THROWS_AS(LoadCheckpointParams(dir, other, nullptr), Error);
  std::filesystem::remove_all(dir.parent_path());
}
