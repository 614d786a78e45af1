// src/frontend/tokens.cc

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

#include "vqtts/frontend/tokens.h"

#include <algorithm>

#include "vqtts/base/error.h"
#include "vqtts/base/text.h"

namespace vqtts::frontend {

bool TokenSequence::HasSil() const {
  return std::find(tokens.begin(), tokens.end(), kSilToken) != tokens.end();
}

TokenSequence Tokenize(std::string_view text, const std::string &language_id) {
  TokenSequence seq;
  seq.language_id = language_id;
  bool pending_gap = false;
  for (char32_t cp : DecodeUtf8(text)) {
    if (IsUnicodeSpace(cp)) {
      pending_gap = !seq.tokens.empty();
      continue;
    }
    if (pending_gap) {
      seq.boundaries.push_back(static_cast<int>(seq.tokens.size()));
      pending_gap = false;
    }
    seq.tokens.push_back(EncodeUtf8(cp));
  }
  if (seq.tokens.empty()) Fail(ErrorCode::kEmptyText, "transcript has no characters");
  return seq;
}

TokenSequence InsertSils(const TokenSequence &seq, const std::vector<bool> &fire) {
  if (seq.HasSil()) Fail(ErrorCode::kAlreadyHasSil, "sequence already has <sil>");
  if (fire.size() != seq.boundaries.size()) {
    Fail(ErrorCode::kShapeMismatch, "one flag per boundary expected");
  }
  TokenSequence out;
  out.language_id = seq.language_id;
  out.tokens.reserve(seq.tokens.size() + fire.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    if (next < seq.boundaries.size() &&
        static_cast<std::size_t>(seq.boundaries[next]) == i) {
      out.boundaries.push_back(static_cast<int>(out.tokens.size()));
      if (fire[next]) out.tokens.emplace_back(kSilToken);
      ++next;
    }
    out.tokens.push_back(seq.tokens[i]);
  }
  return out;
}

TokenSequence RemoveSils(const TokenSequence &seq) {
  TokenSequence out;
  out.language_id = seq.language_id;
  std::vector<int> new_index(seq.tokens.size() + 1);
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    new_index[i] = static_cast<int>(out.tokens.size());
    if (!seq.IsSil(i)) out.tokens.push_back(seq.tokens[i]);
  }
  new_index[seq.tokens.size()] = static_cast<int>(out.tokens.size());
  for (int b : seq.boundaries) out.boundaries.push_back(new_index[b]);
  return out;
}

std::vector<bool> SkippableMask(const TokenSequence &seq) {
  std::vector<bool> mask(seq.tokens.size());
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) mask[i] = seq.IsSil(i);
  return mask;
}

void CheckTokenSequence(const TokenSequence &seq) {
  const auto bad = [](const std::string &why) {
    Fail(ErrorCode::kInvalidArgument, "token sequence: " + why);
  };
  if (seq.tokens.empty()) bad("empty");
  if (!std::is_sorted(seq.boundaries.begin(), seq.boundaries.end()) ||
      std::adjacent_find(seq.boundaries.begin(), seq.boundaries.end()) !=
          seq.boundaries.end()) {
    bad("boundaries not strictly increasing");
  }
  for (int b : seq.boundaries) {
    if (b <= 0 || b >= static_cast<int>(seq.tokens.size())) bad("boundary out of range");
  }
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    const std::string &t = seq.tokens[i];
    if (t.empty()) bad("empty token");
    if (seq.IsSil(i)) {
      if (!std::binary_search(seq.boundaries.begin(), seq.boundaries.end(),
                              static_cast<int>(i))) {
        bad("<sil> away from a boundary");
      }
      if (i + 1 == seq.tokens.size()) bad("trailing <sil>");
      if (seq.IsSil(i + 1)) bad("adjacent <sil>");
      continue;
    }
    for (char32_t cp : DecodeUtf8(t)) {
      if (IsUnicodeSpace(cp)) bad("whitespace token");
    }
  }
}

}  // namespace vqtts::frontend
