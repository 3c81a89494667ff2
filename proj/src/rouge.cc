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

#include "bookalign/rouge.h"

#include <map>

#include "bookalign/common.h"

namespace bookalign {
namespace {

std::map<std::vector<std::string>, std::size_t> CountNgrams(
    std::span<const std::string> tokens, std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
  }
  return counts;
}

}  // namespace

RougeScore RougeN(std::span<const std::string> reference,
                  std::span<const std::string> hypothesis, std::size_t n) {
  if (n == 0) throw InputError("ROUGE order must be positive");
  if (reference.size() < n) {
    throw InputError("reference has " + std::to_string(reference.size()) +
                     " tokens, fewer than n = " + std::to_string(n));
  }
  const auto ref = CountNgrams(reference, n);
  const auto hyp = CountNgrams(hypothesis, n);
  RougeScore score;
  score.n = n;
  for (const auto& [gram, count] : ref) {
    score.reference_total += count;
    const auto it = hyp.find(gram);
    if (it != hyp.end()) score.matches += std::min(count, it->second);
  }
  return score;
}

std::vector<std::string> RougeTokens(const TokenizedDocument& doc) {
  std::vector<std::string> out;
  for (const Token& t : doc.tokens) {
    if (!t.is_punct) out.push_back(t.lower);
  }
  return out;
}

std::vector<std::string> RougeTokens(const TokenizedDocument& doc,
                                     std::span<const std::size_t> sentences) {
  std::vector<std::string> out;
  for (std::size_t s : sentences) {
    const SentenceRange& r = doc.sentences.at(s);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      if (!doc.tokens[i].is_punct) out.push_back(doc.tokens[i].lower);
    }
  }
  return out;
}

}  // namespace bookalign
