// Copyright 2026 The Bookalign Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Alignment results shared by the three aligners, and their record formats.

#ifndef BOOKALIGN_ALIGNMENT_H_
#define BOOKALIGN_ALIGNMENT_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bookalign {

enum class AlignerKind { kPassage, kToken, kJing };

std::string_view AlignerName(AlignerKind kind);
// Accepts "passage", "token" or "jing"; throws ConfigError otherwise.
AlignerKind ParseAlignerKind(std::string_view name);

// One summary sentence mapped to a passage state.
struct SentenceAlignment {
  std::size_t summary_sentence = 0;
  std::size_t state = 0;
  std::size_t span_start = 0;
  std::size_t span_end = 0;  // inclusive
  double posterior = 0.0;
};

// One summary token mapped to a source position, or to a null state.
struct TokenAlignment {
  std::size_t summary_position = 0;
  std::optional<std::size_t> source_position;  // nullopt: null-aligned
  // Transition class of the move into this token's state; nullopt for the
  // first token.
  std::optional<int> bin;
  double posterior = 0.0;
};

struct AlignmentResult {
  std::string pair_id;
  AlignerKind kind = AlignerKind::kPassage;
  std::vector<SentenceAlignment> sentences;
  std::vector<TokenAlignment> tokens;
  double log_likelihood = 0.0;
};

// Passage results write
//   pair_id  summary_sentence  state  span_start  span_end  posterior
// token results write
//   pair_id  summary_position  source_position|NULL  bin|-  posterior
// one record per line, tab separated, after a '#' header naming the model.
void WriteAlignment(std::ostream& out, const AlignmentResult& result);
AlignmentResult ReadAlignment(std::istream& in);

}  // namespace bookalign

#endif  // BOOKALIGN_ALIGNMENT_H_
