// src/base/config.cc

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

#include "vqtts/base/config.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "vqtts/base/error.h"
#include "vqtts/base/text.h"

namespace vqtts {

Config Config::Parse(const std::string &text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    if (auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    body = Trim(body);
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') {
        Fail(ErrorCode::kBadConfig, "unterminated section at line " +
                                        std::to_string(line_no));
      }
      section = std::string(Trim(body.substr(1, body.size() - 2)));
      continue;
    }
    auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      Fail(ErrorCode::kBadConfig,
           "expected key = value at line " + std::to_string(line_no));
    }
    std::string key(Trim(body.substr(0, eq)));
    std::string value(Trim(body.substr(eq + 1)));
    if (key.empty()) {
      Fail(ErrorCode::kBadConfig, "empty key at line " + std::to_string(line_no));
    }
    cfg.values_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

Config Config::Load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

std::string Config::GetString(const std::string &key,
                              const std::string &def) const {
  auto it = values_.find(key);
  return it == values_.end() ? def : it->second;
}

double Config::GetDouble(const std::string &key, double def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  try {
    std::size_t used = 0;
    double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception &) {
    Fail(ErrorCode::kBadConfig, "not a number: " + key + " = " + it->second);
  }
}

std::int64_t Config::GetInt(const std::string &key, std::int64_t def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  std::int64_t v = 0;
  const std::string &s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    Fail(ErrorCode::kBadConfig, "not an integer: " + key + " = " + s);
  }
  return v;
}

bool Config::GetBool(const std::string &key, bool def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  const std::string &s = it->second;
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  Fail(ErrorCode::kBadConfig, "not a boolean: " + key + " = " + s);
}

std::vector<std::int64_t> Config::GetIntList(
    const std::string &key, const std::vector<std::int64_t> &def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  std::vector<std::int64_t> out;
  for (const std::string &part : SplitString(it->second, ',')) {
    Config tmp;
    tmp.Set("v", std::string(Trim(part)));
    out.push_back(tmp.GetInt("v", 0));
  }
  return out;
}

Config Config::Section(const std::string &prefix) const {
  Config out;
  const std::string p = prefix + ".";
  for (const auto &[k, v] : values_) {
    if (k.rfind(p, 0) == 0) out.values_[k.substr(p.size())] = v;
  }
  return out;
}

void Config::Merge(const Config &other) {
  for (const auto &[k, v] : other.values_) values_[k] = v;
}

std::string Config::ToString() const {
  std::ostringstream os;
  for (const auto &[k, v] : values_) os << k << " = " << v << '\n';
  return os.str();
}

void Config::Save(const std::filesystem::path &path) const {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write config " + path.string());
  out << ToString();
}

}  // namespace vqtts
