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

// ROUGE-N recall against a single reference.

#ifndef BOOKALIGN_ROUGE_H_
#define BOOKALIGN_ROUGE_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bookalign/corpus.h"

namespace bookalign {

struct RougeScore {
  std::size_t n = 1;
  std::size_t matches = 0;
  std::size_t reference_total = 0;

  double recall() const {
    return static_cast<double>(matches) / static_cast<double>(reference_total);
  }
};

// sum_g min(c_ref(g), c_hyp(g)) / sum_g c_ref(g) over reference n-grams g.
// Throws InputError when the reference has fewer than n tokens.
RougeScore RougeN(std::span<const std::string> reference,
                  std::span<const std::string> hypothesis, std::size_t n);

// Lowercased tokens with punctuation dropped and stopwords kept.
std::vector<std::string> RougeTokens(const TokenizedDocument& doc);
// The same, restricted to the listed sentences in the given order.
std::vector<std::string> RougeTokens(const TokenizedDocument& doc,
                                     std::span<const std::size_t> sentences);

}  // namespace bookalign

#endif  // BOOKALIGN_ROUGE_H_
