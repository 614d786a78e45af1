// src/toy/sil_rule_corpus.cc

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

#include "vqtts/toy/sil_rule_corpus.h"

#include <random>
#include <string>

namespace vqtts::toy {

std::vector<frontend::SilExample> MakeSilRuleCorpus(std::size_t n_utts, std::uint64_t seed) {
  static const char *kLetters = "abcdeghk";
  static const char *kLangs[] = {"hi", "mr", "te"};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> n_words(2, 7), word_len(1, 4), letter(0, 7), lang(0, 2);
  std::bernoulli_distribution ends_x(0.5);
  std::vector<frontend::SilExample> out;
  for (std::size_t u = 0; u < n_utts; ++u) {
    std::string text;
    const int words = n_words(rng);
    std::vector<bool> silent;
    for (int w = 0; w < words; ++w) {
      if (w) text += ' ';
      for (int c = word_len(rng); c > 0; --c) text += kLetters[letter(rng)];
      const bool x = ends_x(rng);
      if (x) text += 'x';
      if (w + 1 < words) silent.push_back(x);
    }
    out.push_back({frontend::Tokenize(text, kLangs[lang(rng)]), silent});
  }
  return out;
}

}  // namespace vqtts::toy
