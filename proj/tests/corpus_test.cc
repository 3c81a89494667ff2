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

#include "bookalign/corpus.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "bookalign/common.h"

namespace bookalign {
namespace {

TokenizedDocument Tok(std::string_view text) { return Tokenize(text, DefaultStopwords()); }

std::vector<std::string> Surfaces(const TokenizedDocument& doc) {
  std::vector<std::string> out;
  for (const Token& t : doc.tokens) out.push_back(t.surface);
  return out;
}

TEST(TokenizeTest, TwoShortSentences) {
  const TokenizedDocument doc = Tok("Tom ran. He hid.");
  EXPECT_EQ(Surfaces(doc), (std::vector<std::string>{"Tom", "ran", ".", "He", "hid", "."}));
  ASSERT_EQ(doc.sentences.size(), 2u);
  EXPECT_EQ(doc.sentences[0], (SentenceRange{0, 3}));
  EXPECT_EQ(doc.sentences[1], (SentenceRange{3, 6}));
}

TEST(TokenizeTest, EmptyText) {
  const TokenizedDocument doc = Tok("");
  EXPECT_TRUE(doc.tokens.empty());
  EXPECT_TRUE(doc.sentences.empty());
  EXPECT_EQ(doc.content_word_count, 0u);
}

TEST(TokenizeTest, AbbreviationDoesNotEndSentence) {
  const TokenizedDocument doc = Tok("Mr. Kurtz died.");
  EXPECT_EQ(Surfaces(doc), (std::vector<std::string>{"Mr.", "Kurtz", "died", "."}));
  EXPECT_EQ(doc.sentences.size(), 1u);
}

TEST(TokenizeTest, LowercaseAfterPeriodContinuesSentence) {
  EXPECT_EQ(Tok("It cost 3 p. each time.").sentences.size(), 1u);
}

TEST(TokenizeTest, ParagraphBreakEndsSentence) {
  const TokenizedDocument doc = Tok("CHAPTER ONE\n\nIt was dark.");
  ASSERT_EQ(doc.sentences.size(), 2u);
  EXPECT_EQ(doc.tokens[doc.sentences[1].begin].surface, "It");
}

TEST(TokenizeTest, ClosingQuoteStaysWithSentence) {
  const TokenizedDocument doc = Tok("\"Run!\" She ran.");
  ASSERT_EQ(doc.sentences.size(), 2u);
  EXPECT_EQ(doc.tokens[doc.sentences[0].end - 1].surface, "\"");
}

TEST(TokenizeTest, ContractionsAndHyphensStayWhole) {
  EXPECT_EQ(Surfaces(Tok("don't well-known")),
            (std::vector<std::string>{"don't", "well-known"}));
}

TEST(TokenizeTest, FlagsAndCounts) {
  const TokenizedDocument doc = Tok("The Captain saw the river.");
  ASSERT_EQ(doc.tokens.size(), 6u);
  EXPECT_TRUE(doc.tokens[0].is_stopword);
  EXPECT_TRUE(doc.tokens[0].is_sentence_initial);
  EXPECT_TRUE(doc.tokens[1].is_capitalized);
  EXPECT_FALSE(doc.tokens[1].is_sentence_initial);
  EXPECT_EQ(doc.tokens[1].lower, "captain");
  EXPECT_TRUE(doc.tokens[5].is_punct);
  // Captain, saw, river.
  EXPECT_EQ(doc.content_word_count, 3u);
  EXPECT_EQ(doc.SentenceWordCount(0), 5u);
}

TEST(TokenizeTest, OffsetsPointIntoRawText) {
  const std::string text = "Ahab  sailed\n on.";
  const TokenizedDocument doc = Tok(text);
  for (const Token& t : doc.tokens) EXPECT_EQ(text.substr(t.offset, t.surface.size()), t.surface);
}

TEST(TokenizeTest, InvalidUtf8IsAnInputError) {
  EXPECT_THROW(Tok(std::string("bad \xff byte")), InputError);
}

TEST(TokenizeTest, SentenceIndicesPartitionTokens) {
  const TokenizedDocument doc =
      Tok("One fish. Two fish! Red fish? Blue fish...\n\nThe end \"really.\"");
  std::size_t next = 0;
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    EXPECT_EQ(doc.sentences[s].begin, next);
    EXPECT_GT(doc.sentences[s].size(), 0u);
    for (std::size_t i = doc.sentences[s].begin; i < doc.sentences[s].end; ++i) {
      EXPECT_EQ(doc.tokens[i].sentence_index, s);
    }
    next = doc.sentences[s].end;
  }
  EXPECT_EQ(next, doc.tokens.size());
}

TEST(TokenFileTest, RoundTrip) {
  TokenizedDocument doc = Tok("Mr. Marlow went up the river. \"Why?\" he asked.");
  doc.id = "hod";
  std::stringstream buffer;
  WriteTokens(buffer, doc);
  const TokenizedDocument back = ReadTokens(buffer, DefaultStopwords());
  EXPECT_EQ(back.id, "hod");
  ASSERT_EQ(back.tokens.size(), doc.tokens.size());
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    EXPECT_EQ(back.tokens[i].surface, doc.tokens[i].surface);
    EXPECT_EQ(back.tokens[i].is_stopword, doc.tokens[i].is_stopword);
    EXPECT_EQ(back.tokens[i].is_sentence_initial, doc.tokens[i].is_sentence_initial);
    EXPECT_EQ(back.tokens[i].offset, doc.tokens[i].offset);
  }
  EXPECT_EQ(back.sentences, doc.sentences);
  EXPECT_EQ(back.content_word_count, doc.content_word_count);
}

TEST(TokenFileTest, MalformedRecordIsRejected) {
  std::stringstream buffer("0\tword\t0\t--\t0\n");
  EXPECT_THROW(ReadTokens(buffer, DefaultStopwords()), InputError);
}

TEST(GutenbergTest, StripsHeaderAndFooter) {
  const std::string text =
      "Title page\n*** START OF THE PROJECT GUTENBERG EBOOK X ***\nBody text.\n"
      "*** END OF THE PROJECT GUTENBERG EBOOK X ***\nLicense";
  EXPECT_EQ(StripGutenbergBoilerplate(text), "Body text.\n");
  EXPECT_EQ(StripGutenbergBoilerplate("No markers."), "No markers.");
}

TokenizedDocument WithContentWords(std::size_t n) {
  TokenizedDocument doc;
  doc.content_word_count = n;
  return doc;
}

TEST(AdmitPairTest, AverageSizedPairIsAdmitted) {
  // Average book and summary sizes of the reference corpus.
  const AdmissionResult r = AdmitPair(WithContentWords(43223), WithContentWords(369));
  ASSERT_TRUE(std::holds_alternative<BookSummaryPair>(r));
  EXPECT_NEAR(std::get<BookSummaryPair>(r).ratio, 369.0 / 43223.0, 1e-15);
  EXPECT_NEAR(std::get<BookSummaryPair>(r).ratio, 0.0085, 5e-5);
}

TEST(AdmitPairTest, ThresholdsAreInclusive) {
  EXPECT_TRUE(std::holds_alternative<BookSummaryPair>(
      AdmitPair(WithContentWords(10000), WithContentWords(100))));
  const AdmissionResult short_book = AdmitPair(WithContentWords(9999), WithContentWords(500));
  ASSERT_TRUE(std::holds_alternative<PairRejection>(short_book));
  EXPECT_EQ(std::get<PairRejection>(short_book).reason, PairRejection::Reason::kBookTooShort);
  const AdmissionResult short_summary =
      AdmitPair(WithContentWords(20000), WithContentWords(99));
  ASSERT_TRUE(std::holds_alternative<PairRejection>(short_summary));
  const PairRejection& rejection = std::get<PairRejection>(short_summary);
  EXPECT_EQ(rejection.reason, PairRejection::Reason::kSummaryTooShort);
  EXPECT_EQ(rejection.observed, 99u);
  EXPECT_EQ(rejection.required, 100u);
}

TEST(RatioStatsTest, HandComputedFivePairs) {
  const std::vector<double> ratios = {0.03, 0.01, 0.05, 0.02, 0.04};
  const RatioStats stats = CorpusRatioStats(ratios);
  EXPECT_NEAR(stats.mean, 0.03, 1e-15);
  // Nearest rank: ceil(0.05 * 5) = 1, ceil(0.95 * 5) = 5.
  EXPECT_DOUBLE_EQ(stats.quantile05, 0.01);
  EXPECT_DOUBLE_EQ(stats.quantile95, 0.05);
}

TEST(RatioStatsTest, SinglePairIsDegenerate) {
  const std::vector<double> ratios = {0.012};
  const RatioStats stats = CorpusRatioStats(ratios);
  EXPECT_DOUBLE_EQ(stats.mean, 0.012);
  EXPECT_DOUBLE_EQ(stats.quantile05, 0.012);
  EXPECT_DOUBLE_EQ(stats.quantile95, 0.012);
}

TEST(RatioStatsTest, EmptyCorpusThrows) {
  EXPECT_THROW(CorpusRatioStats(std::vector<double>{}), std::invalid_argument);
}

TEST(ManifestTest, RoundTripResolvesRelativePaths) {
  const auto dir = std::filesystem::temp_directory_path() / "bookalign_manifest_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir / "books");
  const std::vector<ManifestEntry> entries = {
      {"p1", dir / "books" / "p1.txt", dir / "summaries" / "p1.txt"},
      {"p2", dir / "books" / "p2.txt", dir / "summaries" / "p2.txt"}};
  WriteManifest(dir / "manifest.tsv", entries);
  std::ifstream raw(dir / "manifest.tsv");
  std::string first;
  std::getline(raw, first);
  EXPECT_EQ(first, "p1\tbooks/p1.txt\tsummaries/p1.txt");
  const auto back = ReadManifest(dir / "manifest.tsv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].id, "p2");
  EXPECT_EQ(back[1].book.lexically_normal(), entries[1].book.lexically_normal());
  std::filesystem::remove_all(dir);
}

TEST(ManifestTest, WrongFieldCountNamesLine) {
  const auto path = std::filesystem::temp_directory_path() / "bookalign_bad_manifest.tsv";
  std::ofstream(path) << "# comment\np1\tbook.txt\n";
  try {
    ReadManifest(path);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace bookalign
