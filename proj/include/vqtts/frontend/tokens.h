// include/vqtts/frontend/tokens.h

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

#ifndef VQTTS_FRONTEND_TOKENS_H_
#define VQTTS_FRONTEND_TOKENS_H_

#include <string>
#include <string_view>
#include <vector>

namespace vqtts::frontend {

inline constexpr std::string_view kSilToken = "<sil>";

/// Character tokens of one utterance.
///
/// `boundaries` holds, for every word gap, the index of the token that sits
/// in the gap: the first character of the next word, or the `<sil>` token
/// occupying the gap when one has been inserted. Inserting a `<sil>` keeps
/// the boundary index of its own gap and shifts every later boundary by one.
struct TokenSequence {
  std::vector<std::string> tokens;
  std::vector<int> boundaries;
  std::string language_id;

  std::size_t size() const { return tokens.size(); }
  bool IsSil(std::size_t i) const { return tokens[i] == kSilToken; }
  bool HasSil() const;
  bool operator==(const TokenSequence &) const = default;
};

/// Splits a normalized transcript into code-point tokens. Whitespace emits
/// no token; each gap between words becomes one boundary.
TokenSequence Tokenize(std::string_view text, const std::string &language_id);

/// Inserts `<sil>` at every boundary b with fire[b] set. Throws
/// AlreadyHasSil if `seq` already carries silence tokens.
TokenSequence InsertSils(const TokenSequence &seq, const std::vector<bool> &fire);

/// `<sil>` at every boundary; used as the candidate graph for alignment.
inline TokenSequence InsertCandidateSils(const TokenSequence &seq) {
  return InsertSils(seq, std::vector<bool>(seq.boundaries.size(), true));
}

/// Drops every `<sil>` and restores boundary indices accordingly.
TokenSequence RemoveSils(const TokenSequence &seq);

/// True for `<sil>` tokens.
std::vector<bool> SkippableMask(const TokenSequence &seq);

/// Throws InvalidArgument when `seq` breaks the sequence invariants.
void CheckTokenSequence(const TokenSequence &seq);

}  // namespace vqtts::frontend

#endif  // VQTTS_FRONTEND_TOKENS_H_
