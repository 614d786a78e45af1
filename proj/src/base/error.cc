// src/base/error.cc

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

#include "vqtts/base/error.h"

namespace vqtts {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kDuplicateUttId: return "DuplicateUttId";
    case ErrorCode::kUnknownSpeaker: return "UnknownSpeaker";
    case ErrorCode::kDigitOutsideBraces: return "DigitOutsideBraces";
    case ErrorCode::kUnbalancedBraces: return "UnbalancedBraces";
    case ErrorCode::kInfeasibleAlignment: return "InfeasibleAlignment";
    case ErrorCode::kNotRowStochastic: return "NotRowStochastic";
    case ErrorCode::kEmptyReference: return "EmptyReference";
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kMissingAlignment: return "MissingAlignment";
    case ErrorCode::kNoBoundaries: return "NoBoundaries";
    case ErrorCode::kAlreadyHasSil: return "AlreadyHasSil";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kDegenerateEmbedding: return "DegenerateEmbedding";
    case ErrorCode::kNoVoicedFrames: return "NoVoicedFrames";
    case ErrorCode::kUnknownLanguage: return "UnknownLanguage";
    case ErrorCode::kAllZeroDurations: return "AllZeroDurations";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyTokens: return "EmptyTokens";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kMissingStats: return "MissingStats";
    case ErrorCode::kNoNativeSpeaker: return "NoNativeSpeaker";
    case ErrorCode::kInconsistentRegistry: return "InconsistentRegistry";
    case ErrorCode::kUnsupportedAudio: return "UnsupportedAudio";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kCorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorCode::kBadConfig: return "BadConfig";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace vqtts
