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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "bookalign/common.h"

namespace bookalign {

// Defined in the generated word_lists.cc.
extern const char kStopwordData[];
extern const char kAbbreviationData[];

namespace {

WordSet ParseWordList(std::string_view data) {
  WordSet words;
  std::size_t pos = 0;
  while (pos <= data.size()) {
    std::size_t end = data.find('\n', pos);
    if (end == std::string_view::npos) end = data.size();
    std::string_view line = data.substr(pos, end - pos);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' ||
                             line.back() == '\t')) {
      line.remove_suffix(1);
    }
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) {
      line.remove_prefix(1);
    }
    if (!line.empty() && line.front() != '#') {
      std::string word(line);
      for (char& c : word) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      }
      words.insert(std::move(word));
    }
    pos = end + 1;
  }
  return words;
}

// Returns the byte length of the code point at `pos`, or 0 when the bytes
// there are not well-formed UTF-8.
std::size_t DecodeUtf8(std::string_view s, std::size_t pos, char32_t* cp) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    *cp = b0;
    return 1;
  }
  std::size_t len;
  char32_t value;
  char32_t min;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2, value = b0 & 0x1F, min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3, value = b0 & 0x0F, min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4, value = b0 & 0x07, min = 0x10000;
  } else {
    return 0;
  }
  if (pos + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[pos + k]);
    if ((b & 0xC0) != 0x80) return 0;
    value = (value << 6) | (b & 0x3F);
  }
  if (value < min || value > 0x10FFFF ||
      (value >= 0xD800 && value <= 0xDFFF)) {
    return 0;
  }
  *cp = value;
  return len;
}

bool IsSpace(char32_t cp) {
  switch (cp) {
    case ' ': case '\t': case '\n': case '\r': case '\f': case '\v':
    case 0xA0: case 0x2028: case 0x2029: case 0x202F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool IsPunct(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  if (cp >= 0xA1 && cp <= 0xBF) return cp != 0xAA && cp != 0xB5 && cp != 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return true;
  if (cp >= 0x2010 && cp <= 0x2027) return true;
  if (cp >= 0x2030 && cp <= 0x205E) return true;
  return cp >= 0x3001 && cp <= 0x3003;
}

bool IsWordChar(char32_t cp) { return !IsSpace(cp) && !IsPunct(cp); }

bool IsJoiner(char32_t cp) { return cp == '\'' || cp == 0x2019 || cp == '-'; }

std::string AsciiLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool IsTerminal(std::string_view s) { return s == "." || s == "!" || s == "?"; }

bool IsClosing(std::string_view s) {
  return s == "\"" || s == "'" || s == ")" || s == "]" || s == "”" ||
         s == "’";
}

bool IsOpeningQuote(std::string_view s) {
  return s == "\"" || s == "'" || s == "(" || s == "“" || s == "‘";
}

struct RawToken {
  std::size_t begin;
  std::size_t end;
  std::size_t newlines_before;
  bool space_before;
};

}  // namespace

const WordSet& DefaultStopwords() {
  static const WordSet words = ParseWordList(kStopwordData);
  return words;
}

const WordSet& DefaultAbbreviations() {
  static const WordSet words = ParseWordList(kAbbreviationData);
  return words;
}

WordSet LoadWordList(const std::filesystem::path& path) {
  return ParseWordList(ReadTextFile(path));
}

std::size_t TokenizedDocument::SentenceWordCount(std::size_t s) const {
  const SentenceRange& range = sentences.at(s);
  std::size_t count = 0;
  for (std::size_t i = range.begin; i < range.end; ++i) {
    if (!tokens[i].is_punct) ++count;
  }
  return count;
}

TokenizedDocument Tokenize(std::string_view text, const WordSet& stopwords,
                           const WordSet& abbreviations, std::string id) {
  std::vector<RawToken> raw;
  std::size_t pos = 0;
  std::size_t newlines = 0;
  bool space = false;
  char32_t cp = 0;
  const auto decode_at = [&](std::size_t at) {
    const std::size_t len = DecodeUtf8(text, at, &cp);
    if (len == 0) {
      throw InputError("invalid UTF-8 at byte " + std::to_string(at));
    }
    return len;
  };

  while (pos < text.size()) {
    std::size_t len = decode_at(pos);
    if (IsSpace(cp)) {
      if (cp == '\n') ++newlines;
      space = true;
      pos += len;
      continue;
    }
    const std::size_t start = pos;
    if (IsWordChar(cp)) {
      pos += len;
      while (pos < text.size()) {
        len = decode_at(pos);
        if (IsWordChar(cp)) {
          pos += len;
          continue;
        }
        if (IsJoiner(cp) && pos + len < text.size()) {
          char32_t next = 0;
          const std::size_t next_len = DecodeUtf8(text, pos + len, &next);
          if (next_len != 0 && IsWordChar(next)) {
            pos += len;
            continue;
          }
        }
        break;
      }
      if (pos < text.size() && text[pos] == '.' &&
          abbreviations.contains(AsciiLower(text.substr(start, pos - start)) +
                                 ".")) {
        ++pos;
      }
    } else {
      pos += len;
    }
    raw.push_back({start, pos, newlines, space || start == 0});
    newlines = 0;
    space = false;
  }

  TokenizedDocument doc;
  doc.id = std::move(id);
  doc.tokens.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Token token;
    token.surface = std::string(text.substr(raw[i].begin, raw[i].end - raw[i].begin));
    token.lower = AsciiLower(token.surface);
    char32_t first = 0;
    DecodeUtf8(token.surface, 0, &first);
    token.is_punct = IsPunct(first);
    token.is_capitalized =
        (first >= 'A' && first <= 'Z') ||
        (first >= 0xC0 && first <= 0xDE && first != 0xD7);
    token.is_stopword = !token.is_punct && stopwords.contains(token.lower);
    token.doc_position = i;
    token.offset = raw[i].begin;
    doc.tokens.push_back(std::move(token));
  }

  // Sentence segmentation.
  const std::size_t n = doc.tokens.size();
  const auto adjacent = [&](std::size_t a, std::size_t b) {
    return raw[a].end == raw[b].begin;
  };
  std::vector<bool> in_terminal_run(n, false);
  std::size_t sentence_begin = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& s = doc.tokens[i].surface;
    in_terminal_run[i] =
        IsTerminal(s) ||
        (i > 0 && in_terminal_run[i - 1] && adjacent(i - 1, i) && IsClosing(s));
    bool boundary = i + 1 == n;
    if (!boundary && raw[i + 1].newlines_before >= 2) boundary = true;
    if (!boundary && in_terminal_run[i]) {
      const Token& next = doc.tokens[i + 1];
      const bool run_continues =
          adjacent(i, i + 1) && (IsTerminal(next.surface) || IsClosing(next.surface));
      if (!run_continues && raw[i + 1].space_before &&
          (next.is_capitalized || IsOpeningQuote(next.surface))) {
        boundary = true;
      }
    }
    if (boundary) {
      doc.sentences.push_back({sentence_begin, i + 1});
      sentence_begin = i + 1;
    }
  }
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    bool seen_word = false;
    for (std::size_t i = doc.sentences[s].begin; i < doc.sentences[s].end; ++i) {
      Token& token = doc.tokens[i];
      token.sentence_index = s;
      if (!seen_word && !token.is_punct) {
        token.is_sentence_initial = true;
        seen_word = true;
      }
    }
  }
  for (const Token& token : doc.tokens) {
    if (token.is_content()) ++doc.content_word_count;
  }
  return doc;
}

std::string_view StripGutenbergBoilerplate(std::string_view text) {
  const auto line_start_marker = [&](std::string_view marker,
                                     std::size_t from) -> std::size_t {
    std::size_t at = text.find(marker, from);
    while (at != std::string_view::npos && at != 0 && text[at - 1] != '\n') {
      at = text.find(marker, at + 1);
    }
    return at;
  };
  std::size_t begin = 0;
  std::size_t start = line_start_marker("*** START OF", 0);
  if (start != std::string_view::npos) {
    const std::size_t eol = text.find('\n', start);
    begin = eol == std::string_view::npos ? text.size() : eol + 1;
  }
  std::size_t end = line_start_marker("*** END OF", begin);
  if (end == std::string_view::npos) end = text.size();
  return text.substr(begin, end - begin);
}

void WriteTokens(std::ostream& out, const TokenizedDocument& doc) {
  out << "# id=" << doc.id << " tokens=" << doc.tokens.size()
      << " sentences=" << doc.sentences.size()
      << " content_words=" << doc.content_word_count << '\n';
  for (const Token& t : doc.tokens) {
    std::string flags = "----";
    if (t.is_punct) flags[0] = 'P';
    if (t.is_stopword) flags[1] = 'S';
    if (t.is_sentence_initial) flags[2] = 'I';
    if (t.is_capitalized) flags[3] = 'C';
    out << t.doc_position << '\t' << t.surface << '\t' << t.sentence_index
        << '\t' << flags << '\t' << t.offset << '\n';
  }
}

TokenizedDocument ReadTokens(std::istream& in, const WordSet& stopwords) {
  TokenizedDocument doc;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::size_t at = line.find("id=");
      if (at != std::string::npos) {
        const std::size_t stop = line.find(' ', at);
        doc.id = line.substr(at + 3, stop == std::string::npos ? std::string::npos
                                                               : stop - at - 3);
      }
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() != 5 || fields[3].size() != 4) {
      throw InputError("malformed token record at line " +
                       std::to_string(line_number));
    }
    Token t;
    try {
      t.doc_position = std::stoul(fields[0]);
      t.sentence_index = std::stoul(fields[2]);
      t.offset = std::stoul(fields[4]);
    } catch (const std::exception&) {
      throw InputError("malformed number at line " + std::to_string(line_number));
    }
    if (t.doc_position != doc.tokens.size() ||
        (!doc.tokens.empty() && t.sentence_index < doc.tokens.back().sentence_index)) {
      throw InputError("out-of-order token at line " + std::to_string(line_number));
    }
    t.surface = fields[1];
    t.lower = AsciiLower(t.surface);
    t.is_punct = fields[3][0] == 'P';
    t.is_sentence_initial = fields[3][2] == 'I';
    t.is_capitalized = fields[3][3] == 'C';
    t.is_stopword = !t.is_punct && stopwords.contains(t.lower);
    doc.tokens.push_back(std::move(t));
  }
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const std::size_t s = doc.tokens[i].sentence_index;
    if (s == doc.sentences.size()) {
      doc.sentences.push_back({i, i + 1});
    } else if (s + 1 == doc.sentences.size()) {
      doc.sentences.back().end = i + 1;
    } else {
      throw InputError("sentence indices skip a value at token " + std::to_string(i));
    }
    if (doc.tokens[i].is_content()) ++doc.content_word_count;
  }
  return doc;
}

std::string PairRejection::Message() const {
  const char* what = reason == Reason::kBookTooShort ? "book" : "summary";
  return std::string(what) + " has " + std::to_string(observed) +
         " content words, fewer than the required " + std::to_string(required);
}

AdmissionResult AdmitPair(TokenizedDocument book, TokenizedDocument summary,
                          const AdmissionThresholds& thresholds) {
  if (book.content_word_count < thresholds.min_book_words) {
    return PairRejection{PairRejection::Reason::kBookTooShort,
                         book.content_word_count, thresholds.min_book_words};
  }
  if (summary.content_word_count < thresholds.min_summary_words) {
    return PairRejection{PairRejection::Reason::kSummaryTooShort,
                         summary.content_word_count, thresholds.min_summary_words};
  }
  BookSummaryPair pair;
  pair.ratio = book.content_word_count == 0
                   ? 0.0
                   : static_cast<double>(summary.content_word_count) /
                         static_cast<double>(book.content_word_count);
  pair.book = std::move(book);
  pair.summary = std::move(summary);
  return pair;
}

double NearestRankQuantile(std::span<const double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

RatioStats CorpusRatioStats(std::span<const double> ratios) {
  if (ratios.empty()) throw std::invalid_argument("no pairs for ratio statistics");
  RatioStats stats;
  double sum = 0.0;
  for (double r : ratios) sum += r;
  stats.mean = sum / static_cast<double>(ratios.size());
  stats.quantile05 = NearestRankQuantile(ratios, 0.05);
  stats.quantile95 = NearestRankQuantile(ratios, 0.95);
  return stats;
}

RatioStats CorpusRatioStats(std::span<const BookSummaryPair> pairs) {
  std::vector<double> ratios;
  ratios.reserve(pairs.size());
  for (const BookSummaryPair& p : pairs) ratios.push_back(p.ratio);
  return CorpusRatioStats(ratios);
}

std::vector<ManifestEntry> ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest " + path.string());
  const std::filesystem::path base = path.parent_path();
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    if (line.find('\t') != std::string::npos) {
      std::stringstream ss(line);
      std::string field;
      while (std::getline(ss, field, '\t')) {
        if (!field.empty()) fields.push_back(field);
      }
    } else {
      std::stringstream ss(line);
      std::string field;
      while (ss >> field) fields.push_back(field);
    }
    if (fields.size() != 3) {
      throw InputError(path.string() + ":" + std::to_string(line_number) +
                       ": expected pair id, book path and summary path");
    }
    ManifestEntry entry{fields[0], fields[1], fields[2]};
    if (entry.book.is_relative()) entry.book = base / entry.book;
    if (entry.summary.is_relative()) entry.summary = base / entry.summary;
    entries.push_back(std::move(entry));
  }
  return entries;
}

void WriteManifest(const std::filesystem::path& path,
                   std::span<const ManifestEntry> entries) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write manifest " + path.string());
  const std::filesystem::path base = path.parent_path();
  const auto relative = [&](const std::filesystem::path& p) {
    if (base.empty()) return p.string();
    return std::filesystem::absolute(p)
        .lexically_relative(std::filesystem::absolute(base))
        .string();
  };
  for (const ManifestEntry& e : entries) {
    out << e.id << '\t' << relative(e.book) << '\t' << relative(e.summary)
        << '\n';
  }
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bookalign
