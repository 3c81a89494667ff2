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

#include "bookalign/summarizer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "bookalign/common.h"

namespace bookalign {
namespace {

std::string Numbered(const char* format, std::size_t value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

std::string FormatWeight(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

FeatureSpace FeatureSpace::Build(std::span<const TokenizedDocument* const> books,
                                 std::size_t vocab_limit) {
  FeatureSpace space;
  if (vocab_limit > kLexicalFeatures) {
    throw ConfigError("vocabulary limit exceeds the lexical block size");
  }
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const TokenizedDocument* book : books) {
    std::unordered_set<std::string> seen;
    for (const Token& t : book->tokens) {
      if (t.is_punct) continue;
      ++counts[t.lower];
      if (seen.insert(t.lower).second) ++space.df_[t.lower];
    }
    space.source_ids_.push_back(book->id);
  }
  std::sort(space.source_ids_.begin(), space.source_ids_.end());
  space.num_documents_ = books.size();

  std::vector<std::pair<std::string, std::uint64_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > vocab_limit) ranked.resize(vocab_limit);
  for (auto& [word, count] : ranked) {
    space.index_.emplace(word, static_cast<int>(space.vocabulary_.size()));
    space.vocabulary_.push_back(word);
  }
  return space;
}

int FeatureSpace::LexicalIndex(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  return it == index_.end() ? -1 : it->second;
}

double FeatureSpace::Idf(std::string_view word) const {
  if (num_documents_ == 0) return 0.0;
  const auto it = df_.find(std::string(word));
  const double df = it == df_.end() ? 1.0 : static_cast<double>(it->second);
  return std::log(static_cast<double>(num_documents_) / df);
}

bool FeatureSpace::IsUnused(std::size_t index) const {
  if (index >= kLexicalOffset && index < kFirstMentionOffset) {
    return index - kLexicalOffset >= vocabulary_.size();
  }
  if (index >= kFirstMentionOffset && index < kTfidfOffset) {
    return index - kFirstMentionOffset >= vocabulary_.size();
  }
  return false;
}

std::string FeatureSpace::FeatureName(std::size_t index) const {
  if (index < kNameOffset) return "DECILE_" + std::to_string(index - kDecileOffset);
  if (index < kLexicalOffset) return Numbered("IS_NAME_%02zu", index - kNameOffset);
  if (index < kFirstMentionOffset) {
    const std::size_t slot = index - kLexicalOffset;
    return slot < vocabulary_.size() ? vocabulary_[slot]
                                     : Numbered("__UNUSED_LEX_%05zu", slot);
  }
  if (index < kTfidfOffset) {
    const std::size_t slot = index - kFirstMentionOffset;
    return slot < vocabulary_.size() ? "FIRST_" + vocabulary_[slot]
                                     : Numbered("__UNUSED_FIRST_%05zu", slot);
  }
  if (index < kFeatureDim) {
    return "TF-IDF < " + std::to_string(kTfidfThresholds[index - kTfidfOffset]);
  }
  throw std::out_of_range("feature index " + std::to_string(index));
}

void FeatureSpace::Save(std::ostream& out) const {
  out << "# feature-space documents=" << num_documents_
      << " vocabulary=" << vocabulary_.size() << '\n';
  for (const std::string& id : source_ids_) out << "source\t" << id << '\n';
  for (const std::string& w : vocabulary_) out << "word\t" << w << '\n';
  const std::map<std::string, std::uint32_t> sorted(df_.begin(), df_.end());
  for (const auto& [w, df] : sorted) out << "df\t" << w << '\t' << df << '\n';
}

FeatureSpace FeatureSpace::Load(std::istream& in) {
  FeatureSpace space;
  std::string line;
  if (!std::getline(in, line) ||
      std::sscanf(line.c_str(), "# feature-space documents=%zu", &space.num_documents_) != 1) {
    throw InputError("feature space file has no header");
  }
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) f.push_back(field);
    const std::string where = "feature space line " + std::to_string(line_number);
    if (f.size() == 2 && f[0] == "source") {
      space.source_ids_.push_back(f[1]);
    } else if (f.size() == 2 && f[0] == "word") {
      space.index_.emplace(f[1], static_cast<int>(space.vocabulary_.size()));
      space.vocabulary_.push_back(f[1]);
    } else if (f.size() == 3 && f[0] == "df") {
      try {
        space.df_[f[1]] = static_cast<std::uint32_t>(std::stoul(f[2]));
      } catch (const std::logic_error&) {
        throw InputError(where + ": malformed count");
      }
    } else {
      throw InputError(where + ": unrecognized record");
    }
  }
  if (space.vocabulary_.size() > kLexicalFeatures) {
    throw InputError("feature space vocabulary exceeds the lexical block size");
  }
  return space;
}

std::vector<std::pair<std::string, double>> RankByTfidf(const TokenizedDocument& doc,
                                                        const FeatureSpace& space,
                                                        bool capitalized_only) {
  std::map<std::string, std::size_t> tf;
  for (const Token& t : doc.tokens) {
    if (t.is_punct) continue;
    if (capitalized_only && (!t.is_capitalized || t.is_sentence_initial)) continue;
    ++tf[t.lower];
  }
  std::vector<std::pair<std::string, double>> ranked;
  for (const auto& [word, count] : tf) {
    const double score = static_cast<double>(count) * space.Idf(word);
    if (score > 0.0) ranked.emplace_back(word, score);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return ranked;
}

std::vector<std::vector<std::uint32_t>> Featurize(const TokenizedDocument& book,
                                                  const FeatureSpace& space) {
  const std::size_t num_sentences = book.sentences.size();
  std::unordered_map<std::string, std::size_t> name_rank;
  {
    const auto names = RankByTfidf(book, space, true);
    for (std::size_t r = 0; r < names.size() && r < kNameFeatures; ++r) {
      name_rank.emplace(names[r].first, r);
    }
  }
  std::unordered_map<std::string, std::size_t> tfidf_rank;
  {
    const auto words = RankByTfidf(book, space, false);
    const std::size_t limit = kTfidfThresholds[kTfidfFeatures - 1];
    for (std::size_t r = 0; r < words.size() && r < limit; ++r) {
      tfidf_rank.emplace(words[r].first, r);
    }
  }
  std::unordered_map<std::string, std::size_t> first_sentence;
  for (const Token& t : book.tokens) {
    if (!t.is_punct) first_sentence.emplace(t.lower, t.sentence_index);
  }

  std::vector<std::vector<std::uint32_t>> rows(num_sentences);
  for (std::size_t s = 0; s < num_sentences; ++s) {
    std::set<std::uint32_t> active;
    active.insert(static_cast<std::uint32_t>(
        kDecileOffset + std::min<std::size_t>(9, 10 * s / num_sentences)));
    const SentenceRange& range = book.sentences[s];
    for (std::size_t i = range.begin; i < range.end; ++i) {
      const Token& t = book.tokens[i];
      if (t.is_punct) continue;
      const int lex = space.LexicalIndex(t.lower);
      if (lex >= 0) {
        active.insert(static_cast<std::uint32_t>(kLexicalOffset + lex));
        if (first_sentence.at(t.lower) == s) {
          active.insert(static_cast<std::uint32_t>(kFirstMentionOffset + lex));
        }
      }
      if (t.is_capitalized) {
        const auto it = name_rank.find(t.lower);
        if (it != name_rank.end()) {
          active.insert(static_cast<std::uint32_t>(kNameOffset + it->second));
        }
      }
      const auto rank = tfidf_rank.find(t.lower);
      if (rank != tfidf_rank.end()) {
        for (std::size_t k = 0; k < kTfidfFeatures; ++k) {
          if (rank->second < kTfidfThresholds[k]) {
            active.insert(static_cast<std::uint32_t>(kTfidfOffset + k));
          }
        }
      }
    }
    rows[s].assign(active.begin(), active.end());
  }
  return rows;
}

namespace {

std::vector<std::uint8_t> PassageLabels(const TokenizedDocument& book,
                                        const TokenizedDocument& summary,
                                        const AlignmentResult& alignment, double alpha) {
  std::vector<std::uint8_t> labels(book.sentences.size(), 0);
  std::unordered_set<std::string> types;
  for (const Token& t : book.tokens) types.insert(t.lower);
  const double vocab = static_cast<double>(types.size());
  for (const SentenceAlignment& a : alignment.sentences) {
    if (a.span_end >= book.tokens.size() || a.span_start > a.span_end ||
        a.summary_sentence >= summary.sentences.size()) {
      throw InputError("alignment for pair '" + alignment.pair_id +
                       "' does not fit its documents");
    }
    std::vector<std::string> words;
    const SentenceRange& r = summary.sentences[a.summary_sentence];
    for (std::size_t i = r.begin; i < r.end; ++i) {
      if (summary.tokens[i].is_content()) words.push_back(summary.tokens[i].lower);
    }
    const std::size_t first = book.tokens[a.span_start].sentence_index;
    const std::size_t last = book.tokens[a.span_end].sentence_index;
    std::size_t best = first;
    double best_score = kLogZero;
    for (std::size_t s = first; s <= last; ++s) {
      const SentenceRange& range = book.sentences[s];
      std::unordered_map<std::string, std::size_t> freq;
      for (std::size_t i = range.begin; i < range.end; ++i) ++freq[book.tokens[i].lower];
      const double log_norm = std::log(static_cast<double>(range.size()) + alpha * vocab);
      double score = 0.0;
      for (const std::string& w : words) {
        const auto it = freq.find(w);
        const double f = (it == freq.end() ? 0.0 : static_cast<double>(it->second)) + alpha;
        score += f > 0.0 ? std::log(f) - log_norm : kLogZero;
      }
      if (s == first || score > best_score) {
        best = s;
        best_score = score;
      }
    }
    labels[best] = 1;
  }
  return labels;
}

std::vector<std::uint8_t> TokenLabels(const TokenizedDocument& book,
                                      const TokenizedDocument& summary,
                                      const AlignmentResult& alignment) {
  std::vector<std::uint8_t> labels(book.sentences.size(), 0);
  std::vector<std::size_t> content(summary.sentences.size(), 0);
  for (const Token& t : summary.tokens) {
    if (t.is_content()) ++content[t.sentence_index];
  }
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> counts;
  for (const TokenAlignment& a : alignment.tokens) {
    if (!a.source_position) continue;
    if (*a.source_position >= book.tokens.size() ||
        a.summary_position >= summary.tokens.size()) {
      throw InputError("alignment for pair '" + alignment.pair_id +
                       "' does not fit its documents");
    }
    ++counts[{summary.tokens[a.summary_position].sentence_index,
              book.tokens[*a.source_position].sentence_index}];
  }
  for (const auto& [key, count] : counts) {
    const double needed = std::max(2.0, 0.2 * static_cast<double>(content[key.first]));
    if (static_cast<double>(count) >= needed) labels[key.second] = 1;
  }
  return labels;
}

}  // namespace

std::vector<std::uint8_t> LabelsFromAlignment(const TokenizedDocument& book,
                                              const TokenizedDocument& summary,
                                              const AlignmentResult& alignment,
                                              double alpha) {
  if (alignment.kind == AlignerKind::kPassage) {
    return PassageLabels(book, summary, alignment, alpha);
  }
  return TokenLabels(book, summary, alignment);
}

std::vector<std::size_t> ExtractSummary(const TokenizedDocument& book,
                                        std::span<const double> scores,
                                        std::size_t word_budget) {
  if (scores.size() != book.sentences.size()) {
    throw std::invalid_argument("one score per sentence required");
  }
  std::vector<std::size_t> order(scores.size());
  for (std::size_t s = 0; s < order.size(); ++s) order[s] = s;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<std::size_t> chosen;
  std::size_t total = 0;
  for (std::size_t s : order) {
    const std::size_t words = book.SentenceWordCount(s);
    if (words == 0 || total + words > word_budget) continue;
    total += words;
    chosen.push_back(s);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::vector<std::size_t> FirstNBaseline(const TokenizedDocument& book,
                                        std::size_t word_budget) {
  std::vector<std::size_t> chosen;
  std::size_t total = 0;
  for (std::size_t s = 0; s < book.sentences.size(); ++s) {
    const std::size_t words = book.SentenceWordCount(s);
    if (total + words > word_budget) break;
    if (words == 0) continue;
    total += words;
    chosen.push_back(s);
  }
  return chosen;
}

std::size_t WordCount(const TokenizedDocument& doc, std::span<const std::size_t> sentences) {
  std::size_t total = 0;
  for (std::size_t s : sentences) total += doc.SentenceWordCount(s);
  return total;
}

void WriteModel(std::ostream& out, const FeatureSpace& space, const LogisticModel& model) {
  if (model.weights.size() != kFeatureDim) {
    throw std::invalid_argument("model width differs from the feature layout");
  }
  for (std::size_t i = 0; i < kFeatureDim; ++i) {
    if (space.IsUnused(i)) continue;
    out << space.FeatureName(i) << '\t' << FormatWeight(model.weights[i]) << '\n';
  }
  out << kBiasName << '\t' << FormatWeight(model.bias) << '\n';
}

NamedWeights ReadModel(std::istream& in) {
  NamedWeights weights;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::size_t tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw InputError("model line " + std::to_string(line_number) + ": missing tab");
    }
    try {
      weights.emplace_back(line.substr(0, tab), std::stod(line.substr(tab + 1)));
    } catch (const std::logic_error&) {
      throw InputError("model line " + std::to_string(line_number) + ": malformed weight");
    }
  }
  return weights;
}

std::vector<RankedFeature> RankFeatures(std::span<const NamedWeights> folds) {
  std::map<std::string, double> rank_sum;
  std::vector<std::unordered_map<std::string, std::size_t>> ranks(folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    NamedWeights sorted;
    for (const auto& entry : folds[f]) {
      if (entry.first != kBiasName) sorted.push_back(entry);
    }
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    for (std::size_t r = 0; r < sorted.size(); ++r) {
      ranks[f].emplace(sorted[r].first, r + 1);
      rank_sum.emplace(sorted[r].first, 0.0);
    }
  }
  std::vector<RankedFeature> out;
  out.reserve(rank_sum.size());
  for (const auto& [name, unused] : rank_sum) {
    double total = 0.0;
    for (const auto& fold : ranks) {
      const auto it = fold.find(name);
      total += static_cast<double>(it != fold.end() ? it->second : fold.size() + 1);
    }
    out.push_back({name, total / static_cast<double>(folds.size())});
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedFeature& a, const RankedFeature& b) {
    return a.mean_rank < b.mean_rank;
  });
  return out;
}

void WriteFeatureTriplets(std::ostream& out, const FeatureSpace& space,
                          const SparseBinaryMatrix& x, std::span<const std::uint8_t> labels) {
  out << "# rows=" << x.rows() << " features=" << x.num_cols << '\n';
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::uint32_t c : x.row(r)) out << r << '\t' << space.FeatureName(c) << "\t1\n";
    if (r < labels.size()) out << r << "\t__LABEL__\t" << int{labels[r]} << '\n';
  }
}

}  // namespace bookalign
