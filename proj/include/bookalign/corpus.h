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

// Text ingestion: tokenization, sentence segmentation, pair admission and
// corpus length statistics.

#ifndef BOOKALIGN_CORPUS_H_
#define BOOKALIGN_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

namespace bookalign {

using WordSet = std::unordered_set<std::string>;

struct Token {
  std::string surface;
  std::string lower;
  bool is_punct = false;
  bool is_stopword = false;
  std::size_t sentence_index = 0;
  std::size_t doc_position = 0;
  bool is_sentence_initial = false;
  bool is_capitalized = false;
  // Byte offset of `surface` in the raw text.
  std::size_t offset = 0;

  bool is_content() const { return !is_punct && !is_stopword; }
};

// Half-open token range [begin, end).
struct SentenceRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool operator==(const SentenceRange&) const = default;
};

struct TokenizedDocument {
  std::string id;
  std::vector<Token> tokens;
  std::vector<SentenceRange> sentences;
  // Tokens that are neither punctuation nor stopwords.
  std::size_t content_word_count = 0;

  std::size_t size() const { return tokens.size(); }
  // Number of non-punctuation tokens in sentence `s` (the summary budget
  // counts words this way).
  std::size_t SentenceWordCount(std::size_t s) const;
};

// Built-in lists, compiled from data/stopwords.txt and data/abbreviations.txt.
const WordSet& DefaultStopwords();
const WordSet& DefaultAbbreviations();

// One lowercase entry per line; blank lines and '#' comments are skipped.
WordSet LoadWordList(const std::filesystem::path& path);

// Splits raw UTF-8 text into word and punctuation tokens and segments
// sentences. A sentence ends at '.', '!' or '?' (plus any closing quotes glued
// to it) when followed by whitespace and a capitalized or quote token, at a
// blank line, or at the end of the text. Words listed in `abbreviations`
// (e.g. "mr.") keep their period and never end a sentence.
// Throws InputError on invalid UTF-8.
TokenizedDocument Tokenize(std::string_view raw_text, const WordSet& stopwords,
                           const WordSet& abbreviations = DefaultAbbreviations(),
                           std::string id = {});

// Keeps the text between Project Gutenberg "*** START OF" / "*** END OF"
// marker lines when present.
std::string_view StripGutenbergBoilerplate(std::string_view text);

// Line-delimited token records: position, surface, sentence index, flags
// (P=punct S=stopword I=sentence-initial C=capitalized, '-' when unset) and
// byte offset, tab separated, after a '#' header line.
void WriteTokens(std::ostream& out, const TokenizedDocument& doc);
TokenizedDocument ReadTokens(std::istream& in, const WordSet& stopwords);

struct BookSummaryPair {
  TokenizedDocument book;
  TokenizedDocument summary;
  // summary content words / book content words
  double ratio = 0.0;
};

struct AdmissionThresholds {
  std::size_t min_book_words = 10000;
  std::size_t min_summary_words = 100;
};

struct PairRejection {
  enum class Reason { kBookTooShort, kSummaryTooShort };
  Reason reason;
  std::size_t observed = 0;
  std::size_t required = 0;
  std::string Message() const;
};

using AdmissionResult = std::variant<BookSummaryPair, PairRejection>;

AdmissionResult AdmitPair(TokenizedDocument book, TokenizedDocument summary,
                          const AdmissionThresholds& thresholds = {});

struct RatioStats {
  double mean = 0.0;
  double quantile05 = 0.0;
  double quantile95 = 0.0;
};

// Nearest-rank quantiles. Throws std::invalid_argument on empty input.
RatioStats CorpusRatioStats(std::span<const double> ratios);
RatioStats CorpusRatioStats(std::span<const BookSummaryPair> pairs);
double NearestRankQuantile(std::span<const double> values, double p);

struct ManifestEntry {
  std::string id;
  std::filesystem::path book;
  std::filesystem::path summary;
};

// Each line: pair id, book path, summary path (tab or space separated).
// Relative paths resolve against the manifest's directory.
std::vector<ManifestEntry> ReadManifest(const std::filesystem::path& path);
void WriteManifest(const std::filesystem::path& path,
                   std::span<const ManifestEntry> entries);

std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace bookalign

#endif  // BOOKALIGN_CORPUS_H_
