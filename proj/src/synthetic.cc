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

#include "bookalign/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "bookalign/common.h"

namespace bookalign {
namespace {

constexpr const char* kStopwordPool[] = {"the", "of", "and", "a",  "to",  "in",
                                         "was", "he", "she", "it", "his", "her"};
constexpr std::size_t kStopwordPoolSize = sizeof(kStopwordPool) / sizeof(kStopwordPool[0]);

// Pronounceable, never-repeating pseudo-words that avoid the stopword and
// abbreviation lists.
class WordFactory {
 public:
  std::string Next() {
    static constexpr char kConsonants[] = "bdfgklmnprstvz";
    static constexpr char kVowels[] = "aeiou";
    constexpr std::size_t kSyllables = 14 * 5;
    for (;;) {
      std::size_t n = next_++ + kSyllables * kSyllables;
      std::string word;
      while (n > 0) {
        const std::size_t s = n % kSyllables;
        word += kConsonants[s / 5];
        word += kVowels[s % 5];
        n /= kSyllables;
      }
      if (!DefaultStopwords().contains(word) && !DefaultAbbreviations().contains(word + ".")) {
        return word;
      }
    }
  }

 private:
  std::size_t next_ = 0;
};

std::string Capitalize(std::string word) {
  if (!word.empty() && word[0] >= 'a' && word[0] <= 'z') word[0] = static_cast<char>(word[0] - 32);
  return word;
}

std::string Lower(std::string word) {
  for (char& c : word) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  }
  return word;
}

// Accumulates surface tokens and the text they tokenize back into.
class TextBuilder {
 public:
  std::size_t size() const { return tokens_.size(); }

  // Appends one sentence; returns the token position of every word.
  std::vector<std::size_t> Sentence(const std::vector<std::string>& words) {
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (!text_.empty()) text_ += ' ';
      const std::string surface = i == 0 ? Capitalize(words[i]) : words[i];
      text_ += surface;
      positions.push_back(tokens_.size());
      tokens_.push_back(surface);
    }
    text_ += '.';
    tokens_.push_back(".");
    return positions;
  }

  const std::string& text() const { return text_; }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::string text_;
  std::vector<std::string> tokens_;
};

void CheckTokenization(const TextBuilder& builder, const std::string& what) {
  const TokenizedDocument doc = Tokenize(builder.text(), DefaultStopwords());
  bool same = doc.tokens.size() == builder.tokens().size();
  for (std::size_t i = 0; same && i < doc.tokens.size(); ++i) {
    same = doc.tokens[i].surface == builder.tokens()[i];
  }
  if (!same) throw std::logic_error("synthetic " + what + " does not tokenize as planned");
}

std::size_t SentenceLength(Rng& rng, std::size_t remaining) {
  const std::size_t len = 8 + static_cast<std::size_t>(rng.Below(7));
  // Avoid leaving a fragment shorter than a few words.
  return remaining < len + 4 ? remaining : len;
}

void EmitFiller(TextBuilder& book, Rng& rng, const std::vector<std::string>& vocab,
                std::size_t words) {
  while (words > 0) {
    const std::size_t len = SentenceLength(rng, words);
    std::vector<std::string> sentence;
    for (std::size_t i = 0; i < len; ++i) {
      if (i > 0 && rng.Uniform01() < 0.3) {
        sentence.emplace_back(kStopwordPool[rng.Below(kStopwordPoolSize)]);
      } else {
        sentence.push_back(vocab[rng.Below(vocab.size())]);
      }
    }
    book.Sentence(sentence);
    words -= len;
  }
}

void Validate(const SyntheticConfig& c) {
  if (c.num_pairs == 0 || c.num_passages == 0 || c.vocab_per_passage == 0 ||
      c.summary_sentences_per_passage == 0 || c.filler_vocab == 0) {
    throw ConfigError("synthetic corpus sizes must be positive");
  }
  if (c.block_words < 8) throw ConfigError("planted blocks need at least 8 words");
  if (c.summary_sentence_words < 3 || c.summary_sentence_words > c.block_words / 2) {
    throw ConfigError("summary sentences need between 3 and block_words/2 words");
  }
  if (!(c.overlap >= 0.0 && c.overlap < 1.0)) throw ConfigError("overlap must lie in [0, 1)");
}

}  // namespace

std::vector<SyntheticPair> GenerateSyntheticCorpus(const SyntheticConfig& config) {
  Validate(config);
  Rng rng(config.seed);
  WordFactory factory;
  std::vector<std::string> filler(config.filler_vocab);
  for (std::string& w : filler) w = factory.Next();

  std::vector<SyntheticPair> pairs;
  for (std::size_t p = 0; p < config.num_pairs; ++p) {
    const std::size_t k = config.num_passages;
    std::vector<std::vector<std::string>> vocab(k);
    std::vector<std::string> names(k), starts(k), ends(k);
    for (std::size_t b = 0; b < k; ++b) {
      vocab[b].resize(config.vocab_per_passage);
      for (std::string& w : vocab[b]) w = factory.Next();
      names[b] = factory.Next();
      starts[b] = factory.Next();
      ends[b] = factory.Next();
    }
    const auto shared = static_cast<std::size_t>(
        std::lround(config.overlap * static_cast<double>(config.vocab_per_passage)));
    if (shared > 0 && k > 1) {
      const std::vector<std::vector<std::string>> original = vocab;
      for (std::size_t b = 0; b < k; ++b) {
        const std::vector<std::string>& prev = original[(b + k - 1) % k];
        std::copy(prev.end() - static_cast<std::ptrdiff_t>(shared), prev.end(), vocab[b].begin());
      }
    }

    SyntheticPair pair;
    char id[32];
    std::snprintf(id, sizeof(id), "synth%03zu", p);
    pair.id = id;

    TextBuilder book;
    EmitFiller(book, rng, filler, config.lead_filler_words);
    std::vector<std::vector<std::size_t>> content(k);
    std::vector<std::size_t> first_name(k);
    for (std::size_t b = 0; b < k; ++b) {
      if (b > 0) EmitFiller(book, rng, filler, config.gap_filler_words);
      std::vector<std::string> words(config.block_words);
      std::vector<bool> is_content(config.block_words, false);
      words.front() = starts[b];
      words.back() = ends[b];
      for (std::size_t i = 1; i + 1 < words.size(); ++i) {
        if (i == 3 || i == words.size() / 2) {
          words[i] = Capitalize(names[b]);
          is_content[i] = true;
        } else if (rng.Uniform01() < 0.2) {
          words[i] = kStopwordPool[rng.Below(kStopwordPoolSize)];
        } else {
          words[i] = vocab[b][rng.Below(vocab[b].size())];
          is_content[i] = true;
        }
      }
      std::size_t block_start = 0, block_end = 0;
      for (std::size_t i = 0; i < words.size();) {
        const std::size_t len = SentenceLength(rng, words.size() - i);
        const std::vector<std::size_t> pos = book.Sentence(
            std::vector<std::string>(words.begin() + static_cast<std::ptrdiff_t>(i),
                                     words.begin() + static_cast<std::ptrdiff_t>(i + len)));
        for (std::size_t j = 0; j < len; ++j) {
          const std::size_t w = i + j;
          if (w == 0) block_start = pos[j];
          if (w + 1 == words.size()) block_end = pos[j];
          if (is_content[w]) content[b].push_back(pos[j]);
          if (w == 3) first_name[b] = pos[j];
        }
        i += len;
      }
      pair.blocks.emplace_back(block_start, block_end);
    }
    EmitFiller(book, rng, filler, config.trail_filler_words);

    TextBuilder summary;
    const std::vector<std::string>& book_tokens = book.tokens();
    for (std::size_t b = 0; b < k; ++b) {
      for (std::size_t s = 0; s < config.summary_sentences_per_passage; ++s) {
        // Partial Fisher-Yates draw of distinct block positions.
        std::vector<std::size_t> pool = content[b];
        const std::size_t picks = std::min(config.summary_sentence_words - 2, pool.size());
        for (std::size_t i = 0; i < picks; ++i) {
          std::swap(pool[i], pool[i + rng.Below(pool.size() - i)]);
        }
        std::vector<std::size_t> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(picks));
        if (s == 0 && std::find(chosen.begin(), chosen.end(), first_name[b]) == chosen.end()) {
          chosen.back() = first_name[b];
        }
        std::sort(chosen.begin(), chosen.end());

        std::vector<std::string> words{starts[b]};
        std::vector<std::optional<std::size_t>> sources{pair.blocks[b].first};
        for (std::size_t pos : chosen) {
          if (rng.Uniform01() < 0.5) {
            words.emplace_back(kStopwordPool[rng.Below(kStopwordPoolSize)]);
            sources.emplace_back(std::nullopt);
          }
          const std::string word = Lower(book_tokens[pos]);
          words.push_back(word == names[b] ? Capitalize(word) : word);
          sources.emplace_back(pos);
        }
        words.push_back(ends[b]);
        sources.emplace_back(pair.blocks[b].second);
        summary.Sentence(words);
        pair.token_source.insert(pair.token_source.end(), sources.begin(), sources.end());
        pair.token_source.emplace_back(std::nullopt);  // the period
        pair.sentence_block.push_back(b);
      }
    }

    CheckTokenization(book, "book " + pair.id);
    CheckTokenization(summary, "summary " + pair.id);
    pair.book_text = book.text() + '\n';
    pair.summary_text = summary.text() + '\n';
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

void WriteGold(std::ostream& out, const SyntheticPair& pair) {
  out << "# pair=" << pair.id << '\n';
  out << "tokens " << pair.token_source.size() << '\n';
  for (std::size_t b = 0; b < pair.blocks.size(); ++b) {
    out << "block " << b << ' ' << pair.blocks[b].first << ' ' << pair.blocks[b].second
        << '\n';
  }
  for (std::size_t l = 0; l < pair.sentence_block.size(); ++l) {
    out << "sentence " << l << ' ' << pair.sentence_block[l] << '\n';
  }
  for (std::size_t i = 0; i < pair.token_source.size(); ++i) {
    if (pair.token_source[i]) out << "token " << i << ' ' << *pair.token_source[i] << '\n';
  }
}

SyntheticPair ReadGold(std::istream& in) {
  SyntheticPair pair;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    if (line.rfind("# pair=", 0) == 0) {
      pair.id = line.substr(7);
      continue;
    }
    std::istringstream ss(line);
    std::string kind;
    std::size_t a = 0, b = 0, c = 0;
    ss >> kind >> a;
    if (kind == "tokens" && ss && pair.token_source.size() <= a) {
      pair.token_source.resize(a);
      continue;
    }
    ss >> b;
    bool ok = static_cast<bool>(ss);
    if (ok && kind == "block") {
      ok = static_cast<bool>(ss >> c) && a == pair.blocks.size();
      if (ok) pair.blocks.emplace_back(b, c);
    } else if (ok && kind == "sentence") {
      ok = a == pair.sentence_block.size();
      if (ok) pair.sentence_block.push_back(b);
    } else if (ok && kind == "token") {
      if (pair.token_source.size() <= a) pair.token_source.resize(a + 1);
      pair.token_source[a] = b;
    } else {
      ok = false;
    }
    if (!ok) throw InputError("gold line " + std::to_string(line_number) + ": malformed record");
  }
  return pair;
}

void WriteSyntheticCorpus(const std::filesystem::path& dir,
                          const std::vector<SyntheticPair>& pairs) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "books");
  fs::create_directories(dir / "summaries");
  fs::create_directories(dir / "gold");
  std::vector<ManifestEntry> entries;
  auto write = [](const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw InputError("cannot write " + path.string());
  };
  for (const SyntheticPair& pair : pairs) {
    const fs::path book = dir / "books" / (pair.id + ".txt");
    const fs::path summary = dir / "summaries" / (pair.id + ".txt");
    write(book, pair.book_text);
    write(summary, pair.summary_text);
    std::ostringstream gold;
    WriteGold(gold, pair);
    write(dir / "gold" / (pair.id + ".gold"), gold.str());
    entries.push_back({pair.id, book, summary});
  }
  WriteManifest(dir / "manifest.tsv", entries);
}

}  // namespace bookalign
