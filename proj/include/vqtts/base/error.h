// include/vqtts/base/error.h

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

#ifndef VQTTS_BASE_ERROR_H_
#define VQTTS_BASE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace vqtts {

// Every failure surfaced by the library carries one of these codes so callers
// (and tests) can branch on the kind of failure without parsing messages.
enum class ErrorCode {
  kMalformedRecord,
  kDuplicateUttId,
  kUnknownSpeaker,
  kDigitOutsideBraces,
  kUnbalancedBraces,
  kInfeasibleAlignment,
  kNotRowStochastic,
  kEmptyReference,
  kEmptyText,
  kMissingAlignment,
  kNoBoundaries,
  kAlreadyHasSil,
  kTooShort,
  kInsufficientData,
  kDegenerateEmbedding,
  kNoVoicedFrames,
  kUnknownLanguage,
  kAllZeroDurations,
  kShapeMismatch,
  kEmptyTokens,
  kIndexOutOfRange,
  kEmptyInput,
  kLengthMismatch,
  kMissingStats,
  kNoNativeSpeaker,
  kInconsistentRegistry,
  kUnsupportedAudio,
  kIo,
  kCorruptCheckpoint,
  kBadConfig,
  kInvalidArgument,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string &what) {
  throw Error(code, what);
}

}  // namespace vqtts

#endif  // VQTTS_BASE_ERROR_H_
