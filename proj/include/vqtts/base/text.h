// include/vqtts/base/text.h

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

#ifndef VQTTS_BASE_TEXT_H_
#define VQTTS_BASE_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vqtts {

/// Decodes UTF-8 into code points. Invalid bytes decode as U+FFFD so the
/// caller always gets one code point per visible unit.
std::vector<char32_t> DecodeUtf8(std::string_view text);
std::string EncodeUtf8(char32_t cp);
std::string EncodeUtf8(const std::vector<char32_t> &cps);

bool IsUnicodeSpace(char32_t cp);
// Decimal digits in ASCII and the Indic script blocks, plus fullwidth.
bool IsDigitChar(char32_t cp);

/// Collapses every run of Unicode whitespace to one ASCII space and trims.
std::string CollapseWhitespace(std::string_view text);

std::vector<std::string> SplitString(std::string_view s, char sep);
std::string_view Trim(std::string_view s);

/// 64-bit FNV-1a, used for content hashes and checkpoint checksums.
class Fnv1a {
 public:
  void Update(const void *data, std::size_t n);
  void Update(std::string_view s) { Update(s.data(), s.size()); }
  std::uint64_t digest() const noexcept { return h_; }
  std::string HexDigest() const;

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace vqtts

#endif  // VQTTS_BASE_TEXT_H_
