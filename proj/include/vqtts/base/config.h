// include/vqtts/base/config.h

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

#ifndef VQTTS_BASE_CONFIG_H_
#define VQTTS_BASE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace vqtts {

// Flat `key = value` configuration. `[section]` headers prefix following keys
// with `section.`; `#` starts a comment. Serialization is sorted by key so the
// text form doubles as a canonical hash input.
class Config {
 public:
  static Config Parse(const std::string &text);
  static Config Load(const std::filesystem::path &path);

  bool Has(const std::string &key) const { return values_.count(key) != 0; }
  void Set(const std::string &key, const std::string &value) {
    values_[key] = value;
  }

  std::string GetString(const std::string &key, const std::string &def) const;
  double GetDouble(const std::string &key, double def) const;
  std::int64_t GetInt(const std::string &key, std::int64_t def) const;
  bool GetBool(const std::string &key, bool def) const;
  std::vector<std::int64_t> GetIntList(const std::string &key,
                                       const std::vector<std::int64_t> &def) const;

  // Keys under `prefix.` with the prefix stripped.
  Config Section(const std::string &prefix) const;
  void Merge(const Config &other);

  std::string ToString() const;
  void Save(const std::filesystem::path &path) const;
  const std::map<std::string, std::string> &values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace vqtts

#endif  // VQTTS_BASE_CONFIG_H_
