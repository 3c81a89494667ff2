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

// Extractive summarizer: sentence labels from alignments, binary sentence
// features, and greedy extraction under a word budget.

#ifndef BOOKALIGN_SUMMARIZER_H_
#define BOOKALIGN_SUMMARIZER_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bookalign/alignment.h"
#include "bookalign/corpus.h"
#include "bookalign/kernels.h"
#include "bookalign/logistic.h"

namespace bookalign {

// Feature layout. Every block has a fixed size; lexical slots past the end of
// a small vocabulary stay unused.
inline constexpr std::size_t kDecileFeatures = 10;
inline constexpr std::size_t kNameFeatures = 100;
inline constexpr std::size_t kLexicalFeatures = 10000;
inline constexpr std::size_t kTfidfFeatures = 3;
inline constexpr std::size_t kDecileOffset = 0;
inline constexpr std::size_t kNameOffset = kDecileOffset + kDecileFeatures;
inline constexpr std::size_t kLexicalOffset = kNameOffset + kNameFeatures;
inline constexpr std::size_t kFirstMentionOffset = kLexicalOffset + kLexicalFeatures;
inline constexpr std::size_t kTfidfOffset = kFirstMentionOffset + kLexicalFeatures;
inline constexpr std::size_t kFeatureDim = kTfidfOffset + kTfidfFeatures;
inline constexpr std::size_t kTfidfThresholds[kTfidfFeatures] = {10, 100, 1000};
inline constexpr std::string_view kBiasName = "__BIAS__";

// Vocabulary and document frequencies, estimated from training books only.
class FeatureSpace {
 public:
  FeatureSpace() = default;
  static FeatureSpace Build(std::span<const TokenizedDocument* const> books,
                            std::size_t vocab_limit = kLexicalFeatures);

  // Lexical slot of a lowercased word, or -1.
  int LexicalIndex(std::string_view word) const;
  // log(N / df), with df floored at 1 for words unseen in training.
  double Idf(std::string_view word) const;
  std::string FeatureName(std::size_t index) const;
  // Placeholder slots of an undersized vocabulary.
  bool IsUnused(std::size_t index) const;

  std::span<const std::string> vocabulary() const { return vocabulary_; }
  std::size_t num_documents() const { return num_documents_; }
  // Ids of the books the statistics were computed from.
  std::span<const std::string> source_ids() const { return source_ids_; }

  void Save(std::ostream& out) const;
  static FeatureSpace Load(std::istream& in);

 private:
  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, int> index_;
  std::unordered_map<std::string, std::uint32_t> df_;
  std::size_t num_documents_ = 0;
  std::vector<std::string> source_ids_;
};

// Word types of a document ranked by tf * idf, best first (ties by word),
// restricted to positive scores. With `capitalized_only`, term frequency
// counts only capitalized, non-sentence-initial occurrences.
std::vector<std::pair<std::string, double>> RankByTfidf(const TokenizedDocument& doc,
                                                        const FeatureSpace& space,
                                                        bool capitalized_only);

// Sorted active feature indices for every sentence of `book`.
std::vector<std::vector<std::uint32_t>> Featurize(const TokenizedDocument& book,
                                                  const FeatureSpace& space);

// Passage alignments: within each decoded span, the overlapping book sentence
// with the highest smoothed unigram probability of the summary sentence.
// Token alignments: a book sentence holding at least max(2, 0.2 T) tokens of
// one summary sentence with T content tokens.
std::vector<std::uint8_t> LabelsFromAlignment(const TokenizedDocument& book,
                                              const TokenizedDocument& summary,
                                              const AlignmentResult& alignment,
                                              double alpha = 0.01);

// Sentences ranked by score (ties to the earlier sentence), added greedily
// while the word total stays within the budget; sentences that do not fit
// are skipped. Returned in document order.
std::vector<std::size_t> ExtractSummary(const TokenizedDocument& book,
                                        std::span<const double> scores,
                                        std::size_t word_budget = 1000);

// Leading sentences up to the first one that would exceed the budget.
std::vector<std::size_t> FirstNBaseline(const TokenizedDocument& book,
                                        std::size_t word_budget = 1000);

std::size_t WordCount(const TokenizedDocument& doc, std::span<const std::size_t> sentences);

using NamedWeights = std::vector<std::pair<std::string, double>>;

// "name<TAB>weight" per used feature, bias under kBiasName.
void WriteModel(std::ostream& out, const FeatureSpace& space, const LogisticModel& model);
NamedWeights ReadModel(std::istream& in);

struct RankedFeature {
  std::string name;
  double mean_rank = 0.0;
};

// Ranks features by weight within each fold (1 = largest weight, ties by
// name), averages the ranks over folds and sorts by mean rank, then name.
// A feature missing from a fold takes that fold's feature count plus one.
std::vector<RankedFeature> RankFeatures(std::span<const NamedWeights> folds);

// Sparse triplets "row<TAB>feature<TAB>1", then "row<TAB>__LABEL__<TAB>y".
void WriteFeatureTriplets(std::ostream& out, const FeatureSpace& space,
                          const SparseBinaryMatrix& x, std::span<const std::uint8_t> labels);

}  // namespace bookalign

#endif  // BOOKALIGN_SUMMARIZER_H_
