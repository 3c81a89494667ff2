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

// Synthetic book/summary pairs with known alignments.
//
// A book is filler text with planted blocks. Each block draws from its own
// pseudo-word vocabulary, opens with a unique start anchor word, closes with
// a unique end anchor word and mentions a capitalized name. Every summary
// sentence copies the two anchors of one block plus words sampled from that
// block in book order, so the block and the source position of each copied
// word are known.

#ifndef BOOKALIGN_SYNTHETIC_H_
#define BOOKALIGN_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bookalign/corpus.h"

namespace bookalign {

struct SyntheticConfig {
  std::size_t num_pairs = 10;
  std::size_t num_passages = 5;
  std::size_t vocab_per_passage = 30;
  // Words per planted block, anchors included.
  std::size_t block_words = 60;
  std::size_t summary_sentences_per_passage = 2;
  // Content words per summary sentence, anchors included.
  std::size_t summary_sentence_words = 12;
  std::size_t lead_filler_words = 60;
  std::size_t gap_filler_words = 40;
  std::size_t trail_filler_words = 60;
  std::size_t filler_vocab = 200;
  // Fraction of each block's vocabulary shared with the previous block.
  double overlap = 0.0;
  std::uint64_t seed = 1;
};

struct SyntheticPair {
  std::string id;
  std::string book_text;
  std::string summary_text;
  // Inclusive book token ranges of the planted blocks.
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  // Planted block of every summary sentence.
  std::vector<std::size_t> sentence_block;
  // Book token copied into each summary token; nullopt for stopwords and
  // punctuation.
  std::vector<std::optional<std::size_t>> token_source;
};

// Throws ConfigError on non-positive sizes or an overlap outside [0, 1).
std::vector<SyntheticPair> GenerateSyntheticCorpus(const SyntheticConfig& config);

// Writes books/, summaries/, gold/ and manifest.tsv under `dir`.
void WriteSyntheticCorpus(const std::filesystem::path& dir,
                          const std::vector<SyntheticPair>& pairs);

// Gold file: a "tokens n" line with the summary token count, then
// "block b start end", "sentence l b" and "token i source" lines.
void WriteGold(std::ostream& out, const SyntheticPair& pair);
SyntheticPair ReadGold(std::istream& in);

}  // namespace bookalign

#endif  // BOOKALIGN_SYNTHETIC_H_
