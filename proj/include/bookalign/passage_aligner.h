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

// Passage HMM: each hidden state owns a contiguous, non-overlapping span of
// the book and emits whole summary sentences from the span's unigram
// distribution. Training alternates an E-step, an M-step over the start
// distribution and signed rank-difference jump weights, and an S-step that
// resamples every span's left and then right boundary.

#ifndef BOOKALIGN_PASSAGE_ALIGNER_H_
#define BOOKALIGN_PASSAGE_ALIGNER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bookalign/alignment.h"
#include "bookalign/common.h"
#include "bookalign/corpus.h"
#include "bookalign/hmm.h"

namespace bookalign {

struct PassageSpan {
  std::size_t state = 0;
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive
  std::unordered_map<WordId, std::uint32_t> freq;

  std::size_t length() const { return end - start + 1; }
};

std::unordered_map<WordId, std::uint32_t> CountWords(std::span<const WordId> book,
                                                     std::size_t start,
                                                     std::size_t end);

// sum_k log((freq(t_k) + alpha) / (length + alpha * vocab_size)); alpha = 0 is
// the plain relative-frequency product and yields -inf for unseen words.
double EmissionLogProb(const PassageSpan& span, std::span<const WordId> sentence,
                       double alpha, std::size_t vocab_size);

// Inverted index from summary word to the sentences containing it.
class SummaryIndex {
 public:
  struct Occurrence {
    std::uint32_t sentence;
    std::uint32_t count;
  };

  SummaryIndex() = default;
  SummaryIndex(std::span<const std::vector<WordId>> sentences, std::size_t id_space);

  // Dense local id of a summary word, or -1 for words absent from the summary.
  std::int32_t Local(WordId word) const {
    return word < local_.size() ? local_[word] : -1;
  }
  std::span<const Occurrence> occurrences(std::int32_t local) const {
    return occurrences_[static_cast<std::size_t>(local)];
  }
  std::size_t num_sentences() const { return lengths_.size(); }
  std::size_t num_words() const { return occurrences_.size(); }
  std::size_t sentence_length(std::size_t l) const { return lengths_[l]; }

 private:
  std::vector<std::int32_t> local_;
  std::vector<std::vector<Occurrence>> occurrences_;
  std::vector<std::size_t> lengths_;
};

// Emission log-probabilities of every summary sentence under one span,
// updated in O(occurrences of the moved word) when a boundary moves by one
// token. Removing b_i from [i, j] changes each sentence by
//   freq(b_i; t) * log((f - 1 + alpha) / (f + alpha))
//     + T * log((j - i + 1 + alpha V) / (j - i + alpha V))
// with f = freq(b_i; b_{i:j}); alpha = 0 gives the exact relative-frequency
// recurrence. Zero-frequency factors are counted separately so the state
// never has to subtract infinities.
class SpanEmissionState {
 public:
  enum class Shift { kShrinkLeft, kGrowLeft, kShrinkRight, kGrowRight };

  SpanEmissionState(std::span<const WordId> book, const SummaryIndex& index,
                    double alpha, std::size_t vocab_size, std::size_t start,
                    std::size_t end);

  // Throws std::invalid_argument when shrinking a length-1 span or growing
  // past the book.
  void Apply(Shift shift);

  double LogEmission(std::size_t sentence) const;
  std::vector<double> LogEmissions() const;

  // Weights q_l for the tempered likelihood sum_l q_l log eta_l, maintained
  // incrementally alongside the per-sentence values.
  void SetWeights(std::span<const double> weights);
  double WeightedLogLikelihood() const;

  std::size_t start() const { return start_; }
  std::size_t end() const { return end_; }
  std::size_t length() const { return end_ - start_ + 1; }

 private:
  void Change(WordId word, int delta);
  double LogNormalizer() const;

  std::span<const WordId> book_;
  const SummaryIndex& index_;
  double alpha_;
  double vocab_;
  std::size_t start_;
  std::size_t end_;
  std::vector<std::uint32_t> freq_;
  std::vector<double> sum_log_;
  std::vector<std::uint32_t> zeros_;
  std::vector<double> weights_;
  double weighted_sum_ = 0.0;
  double weighted_length_ = 0.0;
  std::uint64_t weighted_zeros_ = 0;
};

struct PassageConfig {
  std::size_t num_states = 100;
  double alpha = 0.01;
  double transition_floor = 0.01;
  std::uint64_t seed = 1;
  bool sample_boundaries = true;
  // Leading fraction of the sample log ignored when taking modes.
  double burn_in_fraction = 0.2;
  Execution execution = Execution::kParallel;
};

enum class DecodeBoundaries { kModal, kLastIteration };

struct BoundarySampleLog {
  std::size_t num_states = 0;
  // samples[iteration][state] = (start, end) after that iteration's S-step.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> samples;

  std::size_t BurnIn(double fraction) const {
    return static_cast<std::size_t>(fraction * static_cast<double>(samples.size()));
  }
};

// Header "# states=K iterations=N burn_in=B", then "iteration state start end".
void WriteSampleLog(std::ostream& out, const BoundarySampleLog& log,
                    std::size_t burn_in);
BoundarySampleLog ReadSampleLog(std::istream& in, std::size_t* burn_in);

enum class BoundarySide { kLeft, kRight };

class PassageModel {
 public:
  // Splits the book into `num_states` equal spans; the last span takes the
  // remainder. Start and jump weights begin uniform. Throws ConfigError when
  // num_states is 0 or exceeds the book length, InputError on an empty
  // summary.
  PassageModel(const TokenizedDocument& book, const TokenizedDocument& summary,
               const PassageConfig& config);

  // One E-step, M-step and (if enabled) S-step. Returns the E-step
  // log-likelihood, i.e. the likelihood of the parameters entering the call.
  double Iterate();

  void Train(std::size_t iterations,
             const std::function<void(std::size_t, double)>& on_iteration = {});

  // Sets final spans (modal samples after burn-in, or the current spans),
  // reruns the E-step and assigns each summary sentence its most probable
  // state.
  AlignmentResult Decode(DecodeBoundaries mode = DecodeBoundaries::kModal);

  // Forward-backward under the current spans and parameters.
  PosteriorTable EStep(const PairVisitor& visit = nullptr) const;

  double TransitionLogProb(std::size_t from, std::size_t to) const;
  double EmissionLogProbOf(std::size_t state, std::size_t sentence) const;

  // Legal positions for the boundary on `side` given the neighbours:
  // left ranges over [previous end + 1, end], right over [start, next start - 1].
  std::pair<std::size_t, std::size_t> CandidateRange(std::size_t state,
                                                     BoundarySide side) const;
  // Unnormalized log L for every candidate, in increasing position order.
  std::vector<double> BoundaryLogLikelihoods(std::size_t state, BoundarySide side,
                                             std::span<const double> weights) const;
  // Normalized sampling vector over CandidateRange(state, side).
  std::vector<double> BoundaryDistribution(std::size_t state, BoundarySide side,
                                           std::span<const double> weights) const;
  // Resamples the left then the right boundary of `state`.
  void SampleBoundaries(std::size_t state, std::span<const double> weights);

  // Replaces all spans (inclusive ends). Throws std::invalid_argument when they
  // overlap, are out of order or leave the book.
  void SetSpans(std::span<const std::pair<std::size_t, std::size_t>> spans);

  std::size_t num_states() const { return spans_.size(); }
  const std::vector<PassageSpan>& spans() const { return spans_; }
  std::span<const double> log_start() const { return log_start_; }
  // Indexed by rank difference + (K - 1).
  std::span<const double> jump_weights() const { return jump_weights_; }
  void set_jump_weights(std::span<const double> weights);
  const BoundarySampleLog& sample_log() const { return sample_log_; }
  std::span<const WordId> book_words() const { return book_; }
  const std::vector<std::vector<WordId>>& sentences() const { return sentences_; }
  std::size_t book_vocab_size() const { return book_vocab_size_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const PassageConfig& config() const { return config_; }

 private:
  void RefreshTransitions();
  void RecordSample();
  std::vector<double> EmissionTable() const;

  PassageConfig config_;
  Vocabulary vocab_;
  std::vector<WordId> book_;
  std::vector<std::vector<WordId>> sentences_;
  std::size_t book_vocab_size_ = 0;
  SummaryIndex index_;
  std::vector<PassageSpan> spans_;
  std::vector<double> log_start_;
  std::vector<double> jump_weights_;
  std::vector<double> log_transition_;  // K x K
  BoundarySampleLog sample_log_;
  Rng rng_;
};

}  // namespace bookalign

#endif  // BOOKALIGN_PASSAGE_ALIGNER_H_
