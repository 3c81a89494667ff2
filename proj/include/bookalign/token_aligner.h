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

// Token HMM: hidden states are book positions plus a handful of null states,
// observations are summary content words. Jumps are tied by signed distance
// bin and cut off at tau; each book word emits itself or a thesaurus synonym
// with learned probabilities.
//
// Null state r stands for the r-th of B equal regions of the book and is
// placed at the region's centre for distance purposes. A real position can
// only enter the null of its own region; a null can jump to any position,
// with distances beyond tau folded into the outermost bins.

#ifndef BOOKALIGN_TOKEN_ALIGNER_H_
#define BOOKALIGN_TOKEN_ALIGNER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bookalign/alignment.h"
#include "bookalign/common.h"
#include "bookalign/corpus.h"
#include "bookalign/hmm.h"

namespace bookalign {

// Signed distance bins built from positive edges 1 = e_0 < e_1 < ... <= tau:
// bin 0 is {0}; bins 2i+1 and 2i+2 are [e_i, e_{i+1} - 1] and its mirror,
// with the last pair running out to +-tau.
class BinningScheme {
 public:
  static constexpr int kDefaultTau = 1000;

  BinningScheme() : BinningScheme(DefaultEdges(), kDefaultTau) {}
  // Throws ConfigError unless the edges start at 1, increase strictly and do
  // not exceed tau.
  BinningScheme(std::vector<std::int64_t> edges, std::int64_t tau);
  // Comma-separated edge list, e.g. "1,2,11,101".
  static BinningScheme Parse(std::string_view edges, std::int64_t tau);
  static std::vector<std::int64_t> DefaultEdges() { return {1, 2, 11, 101}; }

  // Bin of a signed distance, or -1 beyond tau.
  int Bin(std::int64_t distance) const;
  // Like Bin, but distances beyond tau land in the outermost bin.
  int ClampedBin(std::int64_t distance) const;
  // Inclusive distance range of a bin.
  std::pair<std::int64_t, std::int64_t> Range(int bin) const;
  std::string Describe(int bin) const;

  std::size_t num_bins() const { return 2 * edges_.size() + 1; }
  std::int64_t tau() const { return tau_; }
  std::span<const std::int64_t> edges() const { return edges_; }

 private:
  std::vector<std::int64_t> edges_;
  std::int64_t tau_;
};

// Symmetric, lowercased synonym sets.
class SynonymLexicon {
 public:
  // One headword per line, "head: syn1, syn2, ...". Blank lines and lines
  // starting with '#' are skipped. Throws InputError naming the line.
  static SynonymLexicon Parse(std::istream& in);
  static SynonymLexicon Load(const std::filesystem::path& path);

  void Add(std::string_view a, std::string_view b);
  // Synonyms of `word`, excluding the word itself, sorted.
  std::span<const std::string> Synonyms(std::string_view word) const;
  std::size_t num_headwords() const { return entries_.size(); }

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
};

struct TokenConfig {
  std::int64_t tau = BinningScheme::kDefaultTau;
  std::vector<std::int64_t> bin_edges = BinningScheme::DefaultEdges();
  // 0 disables null states.
  std::size_t null_bins = 9;
  double transition_floor = 0.01;
  // Initial emission weight of a word translating to itself; synonyms get 1.
  double identity_weight = 2.0;
};

class TokenAlignModel {
 public:
  // Observations are the summary's content tokens. Throws InputError when a
  // token has no identity or synonym match and nulls are disabled, or when
  // the book is empty; ConfigError on bad configuration.
  TokenAlignModel(const TokenizedDocument& book, const TokenizedDocument& summary,
                  const SynonymLexicon& lexicon, const TokenConfig& config);

  // One E-step and M-step; returns the E-step log-likelihood.
  double Iterate();
  // Runs until `max_iterations` or a log-likelihood gain below `tolerance`.
  // Returns the per-iteration log-likelihoods.
  std::vector<double> Train(std::size_t max_iterations, double tolerance,
                            const std::function<void(std::size_t, double)>& on_iteration = {});

  // Most probable alignment. With allow_null = false the null states are
  // removed from the lattice but every other parameter is unchanged.
  AlignmentResult ViterbiAlign(bool allow_null = true) const;

  HmmSpec BuildSpec(bool allow_null = true) const;
  PosteriorTable EStep(const PairVisitor& visit = nullptr) const;

  double TransitionLogProb(StateId from, StateId to) const;
  // Bin id of a move; num_bins() for moves into a null state.
  int TransitionBin(StateId from, StateId to) const;
  // eta(target | source), 0 when target is not an allowed translation.
  double EmissionProb(WordId source, WordId target) const;
  // Allowed translations of a book word with their current probabilities.
  std::span<const std::pair<WordId, double>> Translations(WordId source) const;
  double NullEmissionProb() const { return null_emission_; }

  std::size_t num_positions() const { return book_.size(); }
  std::size_t num_nulls() const { return num_nulls_; }
  std::size_t num_states() const { return book_.size() + num_nulls_; }
  bool is_null(StateId s) const { return s >= book_.size(); }
  // First book position of null region r, r in [0, num_nulls]; the last
  // entry is the book length.
  std::size_t RegionStart(std::size_t r) const { return region_start_[r]; }
  std::size_t RegionOf(std::size_t position) const;
  std::size_t NullAnchor(std::size_t r) const;

  const BinningScheme& bins() const { return bins_; }
  // num_bins() weights, followed by the null weight when nulls exist.
  std::span<const double> jump_weights() const { return jump_weights_; }
  void set_jump_weights(std::span<const double> weights);
  std::span<const double> log_start() const { return log_start_; }

  // Summary token positions of the observations, and their candidate book
  // positions (nulls excluded).
  std::span<const std::size_t> observation_positions() const { return obs_positions_; }
  const std::vector<std::vector<std::size_t>>& candidates() const { return candidates_; }
  std::span<const WordId> book_words() const { return book_; }
  std::span<const WordId> observation_words() const { return obs_words_; }
  const Vocabulary& vocabulary() const { return vocab_; }

 private:
  void RefreshTransitions();
  void SetStartFromRegions(std::span<const double> mass);
  std::vector<double> Reach(StateId from) const;

  TokenConfig config_;
  BinningScheme bins_;
  Vocabulary vocab_;
  std::vector<WordId> book_;
  std::vector<WordId> obs_words_;
  std::vector<std::size_t> obs_positions_;
  std::vector<std::vector<std::size_t>> candidates_;
  std::size_t num_nulls_ = 0;
  std::vector<std::size_t> region_start_;
  double null_emission_ = 0.0;
  // Sorted by target word id.
  std::unordered_map<WordId, std::vector<std::pair<WordId, double>>> emissions_;
  std::vector<double> jump_weights_;
  std::vector<double> log_weights_;
  std::vector<double> log_norm_;  // per state
  std::vector<double> log_start_;
};

// Fixed-parameter baseline: identity emissions, no nulls, and hand-set jump
// weights by category. Summary tokens whose type is absent from the book are
// skipped.
class JingAligner {
 public:
  enum Category : int {
    kNextWord = 0,      // q = p + 1 in the same sentence
    kSameSentence = 1,  // anywhere else in p's sentence, p itself included
    kAdjacentSentence = 2,
    kNearby = 3,  // within +-1000 tokens
    kFar = 4,
  };
  static constexpr double kWeights[5] = {0.4, 0.3, 0.15, 0.1, 0.05};
  static constexpr std::int64_t kNearbyWindow = 1000;

  JingAligner(const TokenizedDocument& book, const TokenizedDocument& summary);

  Category Classify(std::size_t from, std::size_t to) const;
  double TransitionLogProb(std::size_t from, std::size_t to) const;
  HmmSpec BuildSpec() const;
  AlignmentResult Align() const;

  std::span<const std::size_t> observation_positions() const { return obs_positions_; }
  const std::vector<std::vector<std::size_t>>& candidates() const { return candidates_; }

 private:
  std::vector<WordId> book_;
  std::vector<std::size_t> sentence_of_;
  std::vector<SentenceRange> sentences_;
  std::vector<std::size_t> obs_positions_;
  std::vector<std::vector<std::size_t>> candidates_;
  std::vector<double> log_norm_;
};

}  // namespace bookalign

#endif  // BOOKALIGN_TOKEN_ALIGNER_H_
