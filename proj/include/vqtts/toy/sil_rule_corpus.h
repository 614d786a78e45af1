// include/vqtts/toy/sil_rule_corpus.h

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

#ifndef VQTTS_TOY_SIL_RULE_CORPUS_H_
#define VQTTS_TOY_SIL_RULE_CORPUS_H_

#include <cstdint>
#include <vector>

#include "vqtts/frontend/sil_predictor.h"

namespace vqtts::toy {

/// Random multi-word utterances where a boundary is silent exactly when the
/// word before it ends in 'x'. About half of the words end in 'x'.
std::vector<frontend::SilExample> MakeSilRuleCorpus(std::size_t n_utts, std::uint64_t seed);

}  // namespace vqtts::toy

#endif  // VQTTS_TOY_SIL_RULE_CORPUS_H_
