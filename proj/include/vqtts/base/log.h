// include/vqtts/base/log.h

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

#ifndef VQTTS_BASE_LOG_H_
#define VQTTS_BASE_LOG_H_

#include <sstream>
#include <string>
#include <string_view>

namespace vqtts {

// Emits one `ts stage key=value ...` line on stderr. Silenced when the
// VQTTS_QUIET environment variable is set (used by the test binaries).
class LogLine {
 public:
  explicit LogLine(std::string_view stage);
  ~LogLine();
  LogLine(const LogLine &) = delete;
  LogLine &operator=(const LogLine &) = delete;

  template <typename V>
  LogLine &kv(std::string_view key, const V &value) {
    os_ << ' ' << key << '=' << value;
    return *this;
  }

 private:
  std::ostringstream os_;
};

}  // namespace vqtts

#endif  // VQTTS_BASE_LOG_H_
