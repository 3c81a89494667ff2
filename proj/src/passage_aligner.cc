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

#include "bookalign/passage_aligner.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "bookalign/kernels.h"

namespace bookalign {

std::unordered_map<WordId, std::uint32_t> CountWords(std::span<const WordId> book,
                                                     std::size_t start,
                                                     std::size_t end) {
  std::unordered_map<WordId, std::uint32_t> freq;
  for (std::size_t i = start; i <= end; ++i) ++freq[book[i]];
  return freq;
}

double EmissionLogProb(const PassageSpan& span, std::span<const WordId> sentence,
                       double alpha, std::size_t vocab_size) {
  if (sentence.empty()) return 0.0;
  double total = 0.0;
  for (WordId w : sentence) {
    const auto it = span.freq.find(w);
    const double f = (it == span.freq.end() ? 0.0 : it->second) + alpha;
    if (f <= 0.0) return kLogZero;
    total += std::log(f);
  }
  const double norm = static_cast<double>(span.length()) +
                      alpha * static_cast<double>(vocab_size);
  return total - static_cast<double>(sentence.size()) * std::log(norm);
}

SummaryIndex::SummaryIndex(std::span<const std::vector<WordId>> sentences,
                           std::size_t id_space)
    : local_(id_space, -1) {
  lengths_.reserve(sentences.size());
  for (std::size_t l = 0; l < sentences.size(); ++l) {
    std::map<WordId, std::uint32_t> counts;
    for (WordId w : sentences[l]) ++counts[w];
    for (const auto& [word, count] : counts) {
      if (word >= local_.size()) local_.resize(word + 1, -1);
      if (local_[word] < 0) {
        local_[word] = static_cast<std::int32_t>(occurrences_.size());
        occurrences_.emplace_back();
      }
      occurrences_[static_cast<std::size_t>(local_[word])].push_back(
          {static_cast<std::uint32_t>(l), count});
    }
    lengths_.push_back(sentences[l].size());
  }
}

SpanEmissionState::SpanEmissionState(std::span<const WordId> book,
                                     const SummaryIndex& index, double alpha,
                                     std::size_t vocab_size, std::size_t start,
                                     std::size_t end)
    : book_(book),
      index_(index),
      alpha_(alpha),
      vocab_(static_cast<double>(vocab_size)),
      start_(start),
      end_(end),
      freq_(index.num_words(), 0),
      sum_log_(index.num_sentences(), 0.0),
      zeros_(index.num_sentences(), 0) {
  if (start > end || end >= book.size()) {
    throw std::invalid_argument("span outside the book");
  }
  for (std::size_t i = start; i <= end; ++i) {
    const std::int32_t local = index_.Local(book_[i]);
    if (local >= 0) ++freq_[static_cast<std::size_t>(local)];
  }
  for (std::size_t w = 0; w < freq_.size(); ++w) {
    const double f = freq_[w] + alpha_;
    for (const SummaryIndex::Occurrence& o :
         index_.occurrences(static_cast<std::int32_t>(w))) {
      if (f > 0.0) {
        sum_log_[o.sentence] += o.count * std::log(f);
      } else {
        zeros_[o.sentence] += o.count;
      }
    }
  }
}

double SpanEmissionState::LogNormalizer() const {
  return std::log(static_cast<double>(length()) + alpha_ * vocab_);
}

void SpanEmissionState::Change(WordId word, int delta) {
  const std::int32_t local = index_.Local(word);
  if (local < 0) return;
  std::uint32_t& f = freq_[static_cast<std::size_t>(local)];
  const double before = f + alpha_;
  f = static_cast<std::uint32_t>(static_cast<std::int64_t>(f) + delta);
  const double after = f + alpha_;
  for (const SummaryIndex::Occurrence& o : index_.occurrences(local)) {
    double d_sum = 0.0;
    std::int64_t d_zero = 0;
    if (before > 0.0) {
      d_sum -= o.count * std::log(before);
    } else {
      d_zero -= o.count;
    }
    if (after > 0.0) {
      d_sum += o.count * std::log(after);
    } else {
      d_zero += o.count;
    }
    sum_log_[o.sentence] += d_sum;
    zeros_[o.sentence] = static_cast<std::uint32_t>(zeros_[o.sentence] + d_zero);
    if (!weights_.empty() && weights_[o.sentence] > 0.0) {
      weighted_sum_ += weights_[o.sentence] * d_sum;
      weighted_zeros_ = static_cast<std::uint64_t>(
          static_cast<std::int64_t>(weighted_zeros_) + d_zero);
    }
  }
}

void SpanEmissionState::Apply(Shift shift) {
  switch (shift) {
    case Shift::kShrinkLeft:
      if (start_ == end_) throw std::invalid_argument("cannot shrink a length-1 span");
      Change(book_[start_], -1);
      ++start_;
      break;
    case Shift::kGrowLeft:
      if (start_ == 0) throw std::invalid_argument("span already starts the book");
      --start_;
      Change(book_[start_], +1);
      break;
    case Shift::kShrinkRight:
      if (start_ == end_) throw std::invalid_argument("cannot shrink a length-1 span");
      Change(book_[end_], -1);
      --end_;
      break;
    case Shift::kGrowRight:
      if (end_ + 1 >= book_.size()) {
        throw std::invalid_argument("span already ends the book");
      }
      ++end_;
      Change(book_[end_], +1);
      break;
  }
}

double SpanEmissionState::LogEmission(std::size_t sentence) const {
  if (zeros_[sentence] > 0) return kLogZero;
  return sum_log_[sentence] -
         static_cast<double>(index_.sentence_length(sentence)) * LogNormalizer();
}

std::vector<double> SpanEmissionState::LogEmissions() const {
  std::vector<double> out(sum_log_.size());
  for (std::size_t l = 0; l < out.size(); ++l) out[l] = LogEmission(l);
  return out;
}

void SpanEmissionState::SetWeights(std::span<const double> weights) {
  if (weights.size() != sum_log_.size()) {
    throw std::invalid_argument("one weight per summary sentence required");
  }
  weights_.assign(weights.begin(), weights.end());
  weighted_sum_ = 0.0;
  weighted_length_ = 0.0;
  weighted_zeros_ = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (weights_[l] <= 0.0) continue;
    weighted_sum_ += weights_[l] * sum_log_[l];
    weighted_length_ += weights_[l] * static_cast<double>(index_.sentence_length(l));
    weighted_zeros_ += zeros_[l];
  }
}

double SpanEmissionState::WeightedLogLikelihood() const {
  if (weighted_zeros_ > 0) return kLogZero;
  return weighted_sum_ - weighted_length_ * LogNormalizer();
}

void WriteSampleLog(std::ostream& out, const BoundarySampleLog& log,
                    std::size_t burn_in) {
  out << "# states=" << log.num_states << " iterations=" << log.samples.size()
      << " burn_in=" << burn_in << '\n';
  for (std::size_t it = 0; it < log.samples.size(); ++it) {
    for (std::size_t s = 0; s < log.samples[it].size(); ++s) {
      out << it << ' ' << s << ' ' << log.samples[it][s].first << ' '
          << log.samples[it][s].second << '\n';
    }
  }
}

BoundarySampleLog ReadSampleLog(std::istream& in, std::size_t* burn_in) {
  BoundarySampleLog log;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# states=", 0) != 0) {
    throw InputError("sample log has no header");
  }
  std::size_t iterations = 0;
  std::size_t burn = 0;
  if (std::sscanf(line.c_str(), "# states=%zu iterations=%zu burn_in=%zu",
                  &log.num_states, &iterations, &burn) != 3) {
    throw InputError("malformed sample log header");
  }
  if (burn_in != nullptr) *burn_in = burn;
  log.samples.assign(iterations, std::vector<std::pair<std::size_t, std::size_t>>(
                                     log.num_states, {0, 0}));
  std::size_t line_number = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::size_t it, s, start, end;
    if (!(ss >> it >> s >> start >> end) || it >= iterations || s >= log.num_states) {
      throw InputError("sample log line " + std::to_string(line_number) +
                       ": malformed record");
    }
    log.samples[it][s] = {start, end};
    ++rows;
  }
  if (rows != iterations * log.num_states) {
    throw InputError("sample log has " + std::to_string(rows) + " records, expected " +
                     std::to_string(iterations * log.num_states));
  }
  return log;
}

PassageModel::PassageModel(const TokenizedDocument& book,
                           const TokenizedDocument& summary,
                           const PassageConfig& config)
    : config_(config), rng_(config.seed) {
  const std::size_t k = config.num_states;
  if (k == 0) throw ConfigError("number of passage states must be positive");
  if (!(config.alpha >= 0.0) || !std::isfinite(config.alpha)) {
    throw ConfigError("smoothing alpha must be a finite non-negative number");
  }
  if (!(config.transition_floor > 0.0)) {
    throw ConfigError("transition floor must be positive");
  }
  if (!(config.burn_in_fraction >= 0.0 && config.burn_in_fraction < 1.0)) {
    throw ConfigError("burn-in fraction must lie in [0, 1)");
  }
  if (book.tokens.size() < k) {
    throw ConfigError("book '" + book.id + "' has " + std::to_string(book.tokens.size()) +
                      " tokens, fewer than the " + std::to_string(k) + " passage states");
  }
  if (summary.sentences.empty()) {
    throw InputError("summary '" + summary.id + "' has no sentences");
  }

  book_.reserve(book.tokens.size());
  for (const Token& t : book.tokens) book_.push_back(vocab_.Intern(t.lower));
  book_vocab_size_ = vocab_.size();
  sentences_.reserve(summary.sentences.size());
  for (const SentenceRange& r : summary.sentences) {
    std::vector<WordId> words;
    for (std::size_t i = r.begin; i < r.end; ++i) {
      const Token& t = summary.tokens[i];
      if (t.is_content()) words.push_back(vocab_.Intern(t.lower));
    }
    sentences_.push_back(std::move(words));
  }
  index_ = SummaryIndex(sentences_, vocab_.size());

  const std::size_t width = book_.size() / k;
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t s = 0; s < k; ++s) {
    const std::size_t start = s * width;
    spans.emplace_back(start, s + 1 == k ? book_.size() - 1 : start + width - 1);
  }
  SetSpans(spans);

  log_start_.assign(k, -std::log(static_cast<double>(k)));
  jump_weights_.assign(2 * k - 1, 1.0);
  RefreshTransitions();
  sample_log_.num_states = k;
}

void PassageModel::SetSpans(std::span<const std::pair<std::size_t, std::size_t>> spans) {
  if (spans.size() != config_.num_states) {
    throw std::invalid_argument("one span per state required");
  }
  for (std::size_t s = 0; s < spans.size(); ++s) {
    const auto [start, end] = spans[s];
    if (start > end || end >= book_.size()) {
      throw std::invalid_argument("span " + std::to_string(s) + " leaves the book");
    }
    if (s > 0 && start <= spans[s - 1].second) {
      throw std::invalid_argument("span " + std::to_string(s) +
                                  " overlaps or precedes its predecessor");
    }
  }
  spans_.clear();
  for (std::size_t s = 0; s < spans.size(); ++s) {
    PassageSpan span;
    span.state = s;
    span.start = spans[s].first;
    span.end = spans[s].second;
    span.freq = CountWords(book_, span.start, span.end);
    spans_.push_back(std::move(span));
  }
}

void PassageModel::set_jump_weights(std::span<const double> weights) {
  if (weights.size() != jump_weights_.size()) {
    throw std::invalid_argument("expected 2K-1 jump weights");
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("jump weights must be finite and positive");
    }
  }
  jump_weights_.assign(weights.begin(), weights.end());
  RefreshTransitions();
}

void PassageModel::RefreshTransitions() {
  const std::size_t k = spans_.size();
  log_transition_.assign(k * k, kLogZero);
  for (std::size_t s = 0; s < k; ++s) {
    double z = 0.0;
    for (std::size_t t = 0; t < k; ++t) z += jump_weights_[t + k - 1 - s];
    const double log_z = std::log(z);
    for (std::size_t t = 0; t < k; ++t) {
      log_transition_[s * k + t] = std::log(jump_weights_[t + k - 1 - s]) - log_z;
    }
  }
}

double PassageModel::TransitionLogProb(std::size_t from, std::size_t to) const {
  return log_transition_[from * spans_.size() + to];
}

double PassageModel::EmissionLogProbOf(std::size_t state, std::size_t sentence) const {
  return EmissionLogProb(spans_[state], sentences_[sentence], config_.alpha,
                         book_vocab_size_);
}

std::vector<double> PassageModel::EmissionTable() const {
  return PassageEmissionTable(spans_, sentences_, config_.alpha, book_vocab_size_,
                              config_.execution);
}

PosteriorTable PassageModel::EStep(const PairVisitor& visit) const {
  const std::size_t k = spans_.size();
  HmmSpec spec;
  spec.num_states = k;
  spec.log_start = log_start_;
  spec.log_transition = [this, k](StateId from, StateId to) {
    return log_transition_[from * k + to];
  };
  const std::vector<double> table = EmissionTable();
  spec.steps = DenseLattice(k, sentences_.size(), table);
  return ForwardBackward(spec, visit);
}

double PassageModel::Iterate() {
  const std::size_t k = spans_.size();
  std::vector<double> jump_counts(2 * k - 1, 0.0);
  std::vector<double> departures(k, 0.0);
  const PosteriorTable post =
      EStep([&](std::size_t, StateId from, StateId to, double p) {
        jump_counts[to + k - 1 - from] += p;
        departures[from] += p;
      });

  for (std::size_t s = 0; s < k; ++s) {
    const double q = post.state_posteriors[0][s];
    log_start_[s] = q > 0.0 ? std::log(q) : kLogZero;
  }
  std::vector<DepartureProfile> profiles(k);
  for (std::size_t s = 0; s < k; ++s) {
    profiles[s].reach.assign(2 * k - 1, 0.0);
    for (std::size_t t = 0; t < k; ++t) profiles[s].reach[t + k - 1 - s] = 1.0;
    profiles[s].departures = departures[s];
  }
  jump_weights_ = EstimateJumpWeights(jump_counts, profiles, jump_weights_,
                                      config_.transition_floor, 50);
  RefreshTransitions();

  if (config_.sample_boundaries) {
    std::vector<double> weights(sentences_.size());
    for (std::size_t s = 0; s < k; ++s) {
      for (std::size_t l = 0; l < weights.size(); ++l) {
        weights[l] = post.state_posteriors[l][s];
      }
      SampleBoundaries(s, weights);
    }
    RecordSample();
  }
  return post.log_likelihood;
}

void PassageModel::Train(std::size_t iterations,
                         const std::function<void(std::size_t, double)>& on_iteration) {
  for (std::size_t it = 0; it < iterations; ++it) {
    const double ll = Iterate();
    if (on_iteration) on_iteration(it, ll);
  }
}

std::pair<std::size_t, std::size_t> PassageModel::CandidateRange(
    std::size_t state, BoundarySide side) const {
  const PassageSpan& span = spans_[state];
  if (side == BoundarySide::kLeft) {
    const std::size_t first = state == 0 ? 0 : spans_[state - 1].end + 1;
    return {first, span.end};
  }
  const std::size_t last =
      state + 1 == spans_.size() ? book_.size() - 1 : spans_[state + 1].start - 1;
  return {span.start, last};
}

std::vector<double> PassageModel::BoundaryLogLikelihoods(
    std::size_t state, BoundarySide side, std::span<const double> weights) const {
  const auto [first, last] = CandidateRange(state, side);
  std::vector<double> out;
  out.reserve(last - first + 1);
  if (side == BoundarySide::kLeft) {
    // Start at the widest span and drop one leading token per candidate.
    SpanEmissionState st(book_, index_, config_.alpha, book_vocab_size_, first, last);
    st.SetWeights(weights);
    for (std::size_t i = first;; ++i) {
      out.push_back(st.WeightedLogLikelihood());
      if (i == last) break;
      st.Apply(SpanEmissionState::Shift::kShrinkLeft);
    }
  } else {
    SpanEmissionState st(book_, index_, config_.alpha, book_vocab_size_, first, first);
    st.SetWeights(weights);
    for (std::size_t j = first;; ++j) {
      out.push_back(st.WeightedLogLikelihood());
      if (j == last) break;
      st.Apply(SpanEmissionState::Shift::kGrowRight);
    }
  }
  return out;
}

std::vector<double> PassageModel::BoundaryDistribution(
    std::size_t state, BoundarySide side, std::span<const double> weights) const {
  return NormalizeLogWeights(BoundaryLogLikelihoods(state, side, weights));
}

void PassageModel::SampleBoundaries(std::size_t state, std::span<const double> weights) {
  PassageSpan& span = spans_[state];
  {
    const std::size_t first = CandidateRange(state, BoundarySide::kLeft).first;
    const std::vector<double> probs =
        BoundaryDistribution(state, BoundarySide::kLeft, weights);
    span.start = first + SampleIndex(probs, rng_.Uniform01());
  }
  {
    const std::size_t first = CandidateRange(state, BoundarySide::kRight).first;
    const std::vector<double> probs =
        BoundaryDistribution(state, BoundarySide::kRight, weights);
    span.end = first + SampleIndex(probs, rng_.Uniform01());
  }
  span.freq = CountWords(book_, span.start, span.end);
}

void PassageModel::RecordSample() {
  std::vector<std::pair<std::size_t, std::size_t>> row;
  row.reserve(spans_.size());
  for (const PassageSpan& s : spans_) row.emplace_back(s.start, s.end);
  sample_log_.samples.push_back(std::move(row));
}

AlignmentResult PassageModel::Decode(DecodeBoundaries mode) {
  const std::size_t k = spans_.size();
  const std::size_t burn_in = sample_log_.BurnIn(config_.burn_in_fraction);
  if (mode == DecodeBoundaries::kModal && burn_in < sample_log_.samples.size()) {
    std::vector<std::pair<std::size_t, std::size_t>> modal(k);
    for (std::size_t s = 0; s < k; ++s) {
      std::map<std::size_t, std::size_t> starts, ends;
      for (std::size_t it = burn_in; it < sample_log_.samples.size(); ++it) {
        ++starts[sample_log_.samples[it][s].first];
        ++ends[sample_log_.samples[it][s].second];
      }
      // std::map iterates in position order, so strict > keeps the earliest mode.
      auto mode_of = [](const std::map<std::size_t, std::size_t>& counts) {
        std::size_t best = 0, best_count = 0;
        for (const auto& [pos, count] : counts) {
          if (count > best_count) {
            best = pos;
            best_count = count;
          }
        }
        return best;
      };
      modal[s] = {mode_of(starts), mode_of(ends)};
    }
    // Per-state modes can collide; push each span right just enough to keep
    // order, leaving room for the states after it.
    const std::size_t n = book_.size();
    std::size_t next_free = 0;
    for (std::size_t s = 0; s < k; ++s) {
      const std::size_t limit = n - (k - s);
      std::size_t start = std::min(std::max(modal[s].first, next_free), limit);
      std::size_t end = std::min(std::max(modal[s].second, start), limit);
      modal[s] = {start, end};
      next_free = end + 1;
    }
    SetSpans(modal);
  }

  const PosteriorTable post = EStep();
  AlignmentResult result;
  result.kind = AlignerKind::kPassage;
  result.log_likelihood = post.log_likelihood;
  for (std::size_t l = 0; l < sentences_.size(); ++l) {
    const std::vector<double>& row = post.state_posteriors[l];
    std::size_t best = 0;
    for (std::size_t s = 1; s < k; ++s) {
      if (row[s] > row[best]) best = s;
    }
    SentenceAlignment a;
    a.summary_sentence = l;
    a.state = best;
    a.span_start = spans_[best].start;
    a.span_end = spans_[best].end;
    a.posterior = row[best];
    result.sentences.push_back(a);
  }
  return result;
}

}  // namespace bookalign
