// src/corpus/corpus.cc

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

#include "vqtts/corpus/corpus.h"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "vqtts/base/error.h"
#include "vqtts/base/text.h"

namespace vqtts::corpus {
namespace fs = std::filesystem;

void SpeakerRegistry::Add(const std::string &speaker_id, SpeakerInfo info) {
  auto [it, inserted] = entries_.emplace(speaker_id, info);
  if (!inserted && it->second.language_id != info.language_id) {
    Fail(ErrorCode::kInconsistentRegistry,
         "speaker " + speaker_id + " registered under " +
             it->second.language_id + " and " + info.language_id);
  }
}

bool SpeakerRegistry::Contains(const std::string &speaker_id) const {
  return entries_.count(speaker_id) != 0;
}

const SpeakerInfo &SpeakerRegistry::Get(const std::string &speaker_id) const {
  auto it = entries_.find(speaker_id);
  if (it == entries_.end()) {
    Fail(ErrorCode::kUnknownSpeaker, "speaker " + speaker_id);
  }
  return it->second;
}

std::vector<std::string> SpeakerRegistry::Speakers() const {
  std::vector<std::string> out;
  for (const auto &[id, info] : entries_) out.push_back(id);
  return out;
}

std::vector<std::string> SpeakerRegistry::Languages() const {
  std::set<std::string> langs;
  for (const auto &[id, info] : entries_) langs.insert(info.language_id);
  return {langs.begin(), langs.end()};
}

std::vector<std::string> SpeakerRegistry::NativeSpeakers(
    const std::string &language_id) const {
  std::vector<std::string> out;
  for (const auto &[id, info] : entries_) {
    if (info.language_id == language_id) out.push_back(id);
  }
  return out;
}

SpeakerRegistry SpeakerRegistry::FromUtterances(
    const std::vector<Utterance> &utts) {
  SpeakerRegistry reg;
  for (const Utterance &u : utts) reg.Add(u.speaker_id, {u.language_id, {}});
  return reg;
}

SpeakerRegistry SpeakerRegistry::Load(const fs::path &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot read registry " + path.string());
  SpeakerRegistry reg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto fields = SplitString(line, '\t');
    if (fields.size() < 2 || fields.size() > 3 || fields[0].empty() ||
        fields[1].empty()) {
      Fail(ErrorCode::kMalformedRecord,
           path.string() + ":" + std::to_string(line_no));
    }
    SpeakerInfo info{fields[1], {}};
    if (fields.size() == 3 && !fields[2].empty()) info.gender = fields[2];
    if (reg.Contains(fields[0])) {
      Fail(ErrorCode::kInconsistentRegistry, "duplicate speaker " + fields[0]);
    }
    reg.Add(fields[0], info);
  }
  return reg;
}

void SpeakerRegistry::Save(const fs::path &path) const {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write registry " + path.string());
  for (const auto &[id, info] : entries_) {
    out << id << '\t' << info.language_id;
    if (info.gender) out << '\t' << *info.gender;
    out << '\n';
  }
}

std::string NormalizeTranscript(std::string_view raw) {
  const std::vector<char32_t> cps = DecodeUtf8(raw);
  std::vector<char32_t> stripped;
  stripped.reserve(cps.size());
  std::ptrdiff_t open_at = -1;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    if (c == U'{') {
      if (open_at >= 0) {
        Fail(ErrorCode::kUnbalancedBraces,
             "nested brace at position " + std::to_string(i));
      }
      open_at = static_cast<std::ptrdiff_t>(i);
      continue;
    }
    if (c == U'}') {
      if (open_at < 0) {
        Fail(ErrorCode::kUnbalancedBraces,
             "unmatched closing brace at position " + std::to_string(i));
      }
      open_at = -1;
      continue;
    }
    if (IsDigitChar(c)) {
      Fail(ErrorCode::kDigitOutsideBraces,
           "digit at position " + std::to_string(i) +
               (open_at >= 0 ? " (digits must be spelled out inside braces)"
                             : ""));
    }
    stripped.push_back(c);
  }
  if (open_at >= 0) {
    Fail(ErrorCode::kUnbalancedBraces,
         "unclosed brace at position " + std::to_string(open_at));
  }
  return CollapseWhitespace(EncodeUtf8(stripped));
}

namespace {

[[noreturn]] void Malformed(int line_no, const std::string &why) {
  Fail(ErrorCode::kMalformedRecord,
       "line " + std::to_string(line_no) + ": " + why);
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::vector<Utterance> ParseManifest(std::string_view text,
                                     const SpeakerRegistry *registry) {
  std::vector<Utterance> utts;
  std::set<std::string> seen;
  SpeakerRegistry implied;
  int line_no = 0;
  for (const std::string &raw_line : SplitString(text, '\n')) {
    ++line_no;
    std::string_view line = raw_line;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty()) continue;
    const auto fields = SplitString(line, '\t');
    Utterance u;
    u.utt_id = fields[0];
    if (u.utt_id.empty()) Malformed(line_no, "empty utterance id");
    std::map<std::string, std::string> kv;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      auto eq = fields[i].find('=');
      if (eq == std::string::npos) Malformed(line_no, "field without '='");
      std::string key = fields[i].substr(0, eq);
      if (!kv.emplace(key, fields[i].substr(eq + 1)).second) {
        Malformed(line_no, "duplicate key " + key);
      }
    }
    for (const char *key : {"speaker", "lang", "audio", "sr", "dur", "text"}) {
      if (!kv.count(key) || kv[key].empty()) {
        Malformed(line_no, std::string("missing ") + key);
      }
    }
    if (kv.size() != 6) Malformed(line_no, "unexpected key");
    u.speaker_id = kv["speaker"];
    u.language_id = kv["lang"];
    u.audio_ref = kv["audio"];
    {
      const std::string &s = kv["sr"];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), u.sample_rate);
      if (ec != std::errc() || ptr != s.data() + s.size() || u.sample_rate <= 0) {
        Malformed(line_no, "sr must be a positive integer");
      }
    }
    {
      const std::string &s = kv["dur"];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), u.duration_s);
      if (ec != std::errc() || ptr != s.data() + s.size() || !(u.duration_s > 0.0)) {
        Malformed(line_no, "dur must be a positive number");
      }
    }
    try {
      u.transcript = NormalizeTranscript(kv["text"]);
    } catch (const Error &e) {
      Malformed(line_no, e.what());
    }
    if (u.transcript.empty()) Malformed(line_no, "empty transcript");

    if (!seen.insert(u.utt_id).second) {
      Fail(ErrorCode::kDuplicateUttId,
           "line " + std::to_string(line_no) + ": " + u.utt_id);
    }
    if (registry != nullptr) {
      if (!registry->Contains(u.speaker_id)) {
        Fail(ErrorCode::kUnknownSpeaker,
             "line " + std::to_string(line_no) + ": " + u.speaker_id);
      }
      if (registry->Get(u.speaker_id).language_id != u.language_id) {
        Fail(ErrorCode::kInconsistentRegistry,
             "line " + std::to_string(line_no) + ": speaker " + u.speaker_id +
                 " is not native in " + u.language_id);
      }
    } else {
      implied.Add(u.speaker_id, {u.language_id, {}});
    }
    utts.push_back(std::move(u));
  }
  return utts;
}

std::vector<Utterance> LoadManifest(const fs::path &path,
                                    const SpeakerRegistry *registry) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot read manifest " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseManifest(ss.str(), registry);
}

std::string FormatManifest(const std::vector<Utterance> &utts) {
  std::ostringstream os;
  for (const Utterance &u : utts) {
    os << u.utt_id << "\tspeaker=" << u.speaker_id << "\tlang=" << u.language_id
       << "\taudio=" << u.audio_ref << "\tsr=" << u.sample_rate
       << "\tdur=" << FormatDouble(u.duration_s) << "\ttext=" << u.transcript
       << '\n';
  }
  return os.str();
}

void SaveManifest(const fs::path &path, const std::vector<Utterance> &utts) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write manifest " + path.string());
  out << FormatManifest(utts);
}

std::map<std::string, std::string> LoadHypotheses(const fs::path &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot read hypotheses " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      Fail(ErrorCode::kMalformedRecord, path.string() + ":" + std::to_string(line_no));
    }
    const std::string id = line.substr(0, tab);
    if (!out.emplace(id, line.substr(tab + 1)).second) {
      Fail(ErrorCode::kDuplicateUttId, path.string() + ": " + id);
    }
  }
  return out;
}

void SaveHypotheses(const fs::path &path, const std::map<std::string, std::string> &hyps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto &[id, hyp] : hyps) out << id << '\t' << hyp << '\n';
  if (!out) Fail(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace vqtts::corpus
