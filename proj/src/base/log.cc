// src/base/log.cc

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

#include "vqtts/base/log.h"

#include <chrono>
#include <cstdlib>
#include <iostream>

namespace vqtts {

LogLine::LogLine(std::string_view stage) {
  using namespace std::chrono;
  auto ms = duration_cast<milliseconds>(system_clock::now().time_since_epoch());
  os_ << ms.count() / 1000 << '.' << (ms.count() % 1000) / 100 << ' ' << stage;
}

LogLine::~LogLine() {
  static const bool quiet = std::getenv("VQTTS_QUIET") != nullptr;
  if (!quiet) std::cerr << os_.str() << '\n';
}

}  // namespace vqtts
