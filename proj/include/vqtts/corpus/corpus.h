// include/vqtts/corpus/corpus.h

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

#ifndef VQTTS_CORPUS_CORPUS_H_
#define VQTTS_CORPUS_CORPUS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vqtts::corpus {

/// One audio + transcript record.
struct Utterance {
  std::string utt_id;
  std::string speaker_id;
  std::string language_id;
  std::string audio_ref;  // relative to the corpus root
  int sample_rate = 0;
  double duration_s = 0.0;
  std::string transcript;  // normalized: no digits, no braces

  bool operator==(const Utterance &) const = default;
};

struct SpeakerInfo {
  std::string language_id;
  std::optional<std::string> gender;

  bool operator==(const SpeakerInfo &) const = default;
};

/// speaker_id -> native language (and optional gender tag).
class SpeakerRegistry {
 public:
  void Add(const std::string &speaker_id, SpeakerInfo info);
  bool Contains(const std::string &speaker_id) const;
  const SpeakerInfo &Get(const std::string &speaker_id) const;

  std::vector<std::string> Speakers() const;
  std::vector<std::string> Languages() const;
  // Sorted speaker ids whose native language is `language_id`.
  std::vector<std::string> NativeSpeakers(const std::string &language_id) const;

  // Registry implied by a manifest; a speaker listed under two languages is
  // an InconsistentRegistry error.
  static SpeakerRegistry FromUtterances(const std::vector<Utterance> &utts);

  // `<speaker>\t<language>[\t<gender>]` per line.
  static SpeakerRegistry Load(const std::filesystem::path &path);
  void Save(const std::filesystem::path &path) const;

  const std::map<std::string, SpeakerInfo> &entries() const { return entries_; }

 private:
  std::map<std::string, SpeakerInfo> entries_;
};

/// Strips `{...}` groups to their content and collapses whitespace. Throws
/// DigitOutsideBraces for any digit left in the result and UnbalancedBraces
/// for stray or nested braces. Positions in errors are code-point offsets.
std::string NormalizeTranscript(std::string_view raw);

/// Reads a manifest: `<utt_id>\tspeaker=..\tlang=..\taudio=..\tsr=..\tdur=..\ttext=..`.
/// The text field is passed through NormalizeTranscript. With a registry,
/// speakers must be registered under the same language.
std::vector<Utterance> LoadManifest(const std::filesystem::path &path,
                                    const SpeakerRegistry *registry = nullptr);
std::vector<Utterance> ParseManifest(std::string_view text,
                                     const SpeakerRegistry *registry = nullptr);
std::string FormatManifest(const std::vector<Utterance> &utts);
void SaveManifest(const std::filesystem::path &path,
                  const std::vector<Utterance> &utts);

/// Recognizer output per utterance: `<utt_id>\t<hypothesis>` per line.
std::map<std::string, std::string> LoadHypotheses(const std::filesystem::path &path);
void SaveHypotheses(const std::filesystem::path &path,
                    const std::map<std::string, std::string> &hyps);

}  // namespace vqtts::corpus

#endif  // VQTTS_CORPUS_CORPUS_H_
