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

#include "bookalign/token_aligner.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

namespace bookalign {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::int64_t Overlap(std::int64_t a_lo, std::int64_t a_hi, std::int64_t b_lo,
                     std::int64_t b_hi) {
  return std::max<std::int64_t>(0, std::min(a_hi, b_hi) - std::max(a_lo, b_lo) + 1);
}

}  // namespace

BinningScheme::BinningScheme(std::vector<std::int64_t> edges, std::int64_t tau)
    : edges_(std::move(edges)), tau_(tau) {
  if (tau_ < 1) throw ConfigError("tau must be at least 1");
  if (edges_.empty() || edges_.front() != 1) {
    throw ConfigError("bin edges must start at 1");
  }
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i] <= edges_[i - 1]) throw ConfigError("bin edges must increase strictly");
  }
  if (edges_.back() > tau_) {
    throw ConfigError("bin edge " + std::to_string(edges_.back()) + " exceeds tau " +
                      std::to_string(tau_));
  }
}

BinningScheme BinningScheme::Parse(std::string_view text, std::int64_t tau) {
  std::vector<std::int64_t> edges;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    const std::string item(Trim(text.substr(pos, comma - pos)));
    std::size_t used = 0;
    std::int64_t value = 0;
    try {
      value = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) {
      throw ConfigError("bad bin edge '" + item + "'");
    }
    edges.push_back(value);
    pos = comma + 1;
  }
  return BinningScheme(std::move(edges), tau);
}

int BinningScheme::Bin(std::int64_t distance) const {
  if (distance == 0) return 0;
  const std::int64_t a = distance < 0 ? -distance : distance;
  if (a > tau_) return -1;
  const auto i = static_cast<int>(
      std::upper_bound(edges_.begin(), edges_.end(), a) - edges_.begin() - 1);
  return distance > 0 ? 2 * i + 1 : 2 * i + 2;
}

int BinningScheme::ClampedBin(std::int64_t distance) const {
  return Bin(std::clamp(distance, -tau_, tau_));
}

std::pair<std::int64_t, std::int64_t> BinningScheme::Range(int bin) const {
  if (bin == 0) return {0, 0};
  const auto i = static_cast<std::size_t>((bin - 1) / 2);
  const std::int64_t lo = edges_[i];
  const std::int64_t hi = i + 1 < edges_.size() ? edges_[i + 1] - 1 : tau_;
  if (bin % 2 == 1) return {lo, hi};
  return {-hi, -lo};
}

std::string BinningScheme::Describe(int bin) const {
  const auto [lo, hi] = Range(bin);
  auto signed_str = [](std::int64_t v) {
    return (v > 0 ? "+" : "") + std::to_string(v);
  };
  if (lo == hi) return signed_str(lo);
  return "[" + signed_str(lo) + "," + signed_str(hi) + "]";
}

SynonymLexicon SynonymLexicon::Parse(std::istream& in) {
  SynonymLexicon lexicon;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view text = Trim(line);
    if (text.empty() || text.front() == '#') continue;
    const std::string where = "thesaurus line " + std::to_string(line_number);
    const std::size_t colon = text.find(':');
    if (colon == std::string_view::npos) throw InputError(where + ": missing ':'");
    const std::string head = Lower(Trim(text.substr(0, colon)));
    if (head.empty()) throw InputError(where + ": empty headword");
    std::string_view rest = text.substr(colon + 1);
    if (Trim(rest).empty()) continue;
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      std::size_t comma = rest.find(',', pos);
      if (comma == std::string_view::npos) comma = rest.size();
      const std::string syn = Lower(Trim(rest.substr(pos, comma - pos)));
      if (syn.empty()) throw InputError(where + ": empty synonym");
      lexicon.Add(head, syn);
      pos = comma + 1;
    }
  }
  return lexicon;
}

SynonymLexicon SynonymLexicon::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open thesaurus " + path.string());
  return Parse(in);
}

void SynonymLexicon::Add(std::string_view a, std::string_view b) {
  const std::string x = Lower(a);
  const std::string y = Lower(b);
  if (x == y) return;
  auto insert = [this](const std::string& key, const std::string& value) {
    std::vector<std::string>& list = entries_[key];
    const auto it = std::lower_bound(list.begin(), list.end(), value);
    if (it == list.end() || *it != value) list.insert(it, value);
  };
  insert(x, y);
  insert(y, x);
}

std::span<const std::string> SynonymLexicon::Synonyms(std::string_view word) const {
  const auto it = entries_.find(word);
  if (it == entries_.end()) return {};
  return it->second;
}

TokenAlignModel::TokenAlignModel(const TokenizedDocument& book,
                                 const TokenizedDocument& summary,
                                 const SynonymLexicon& lexicon, const TokenConfig& config)
    : config_(config), bins_(config.bin_edges, config.tau) {
  if (!(config.transition_floor > 0.0)) {
    throw ConfigError("transition floor must be positive");
  }
  if (!(config.identity_weight > 0.0)) throw ConfigError("identity weight must be positive");
  if (book.tokens.empty()) throw InputError("book '" + book.id + "' is empty");

  std::unordered_map<WordId, std::vector<std::size_t>> positions;
  book_.reserve(book.tokens.size());
  for (const Token& t : book.tokens) {
    const WordId w = vocab_.Intern(t.lower);
    positions[w].push_back(book_.size());
    book_.push_back(w);
  }

  // Allowed translations of every book type, initialized with the identity
  // preferred over synonyms.
  for (const auto& [word, unused] : positions) {
    std::vector<std::pair<WordId, double>> allowed;
    const std::string source = vocab_.Word(word);
    allowed.emplace_back(word, config.identity_weight);
    for (const std::string& syn : lexicon.Synonyms(source)) {
      allowed.emplace_back(vocab_.Intern(syn), 1.0);
    }
    std::sort(allowed.begin(), allowed.end());
    double total = 0.0;
    for (const auto& a : allowed) total += a.second;
    for (auto& a : allowed) a.second /= total;
    emissions_.emplace(word, std::move(allowed));
  }

  const std::size_t m = book_.size();
  num_nulls_ = std::min(config.null_bins, m);
  const std::size_t regions = std::max<std::size_t>(num_nulls_, 1);
  for (std::size_t r = 0; r <= regions; ++r) region_start_.push_back(r * m / regions);

  std::set<WordId> summary_types;
  for (const Token& t : summary.tokens) {
    if (!t.is_content()) continue;
    const WordId v = vocab_.Intern(t.lower);
    summary_types.insert(v);
    std::vector<std::size_t> cands;
    auto add = [&](WordId w) {
      const auto it = positions.find(w);
      if (it != positions.end()) cands.insert(cands.end(), it->second.begin(), it->second.end());
    };
    add(v);
    for (const std::string& syn : lexicon.Synonyms(t.lower)) {
      const WordId w = vocab_.Find(syn);
      if (w != kNoWord) add(w);
    }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    if (cands.empty() && num_nulls_ == 0) {
      throw InputError("summary token '" + t.lower + "' at position " +
                       std::to_string(t.doc_position) +
                       " has no match in the book and null states are disabled");
    }
    obs_words_.push_back(v);
    obs_positions_.push_back(t.doc_position);
    candidates_.push_back(std::move(cands));
  }
  if (obs_words_.empty()) {
    throw InputError("summary '" + summary.id + "' has no content tokens");
  }
  null_emission_ = 1.0 / static_cast<double>(summary_types.size());

  jump_weights_.assign(bins_.num_bins() + (num_nulls_ > 0 ? 1 : 0), 1.0);
  RefreshTransitions();

  std::vector<double> mass(regions + num_nulls_);
  const double states = static_cast<double>(num_states());
  for (std::size_t r = 0; r < regions; ++r) {
    mass[r] = static_cast<double>(region_start_[r + 1] - region_start_[r]) / states;
  }
  for (std::size_t r = 0; r < num_nulls_; ++r) mass[regions + r] = 1.0 / states;
  SetStartFromRegions(mass);
}

std::size_t TokenAlignModel::RegionOf(std::size_t position) const {
  return static_cast<std::size_t>(
      std::upper_bound(region_start_.begin(), region_start_.end(), position) -
      region_start_.begin() - 1);
}

std::size_t TokenAlignModel::NullAnchor(std::size_t r) const {
  return (region_start_[r] + region_start_[r + 1] - 1) / 2;
}

void TokenAlignModel::SetStartFromRegions(std::span<const double> mass) {
  const std::size_t regions = region_start_.size() - 1;
  log_start_.assign(num_states(), kLogZero);
  for (std::size_t r = 0; r < regions; ++r) {
    const double width = static_cast<double>(region_start_[r + 1] - region_start_[r]);
    const double v = mass[r] > 0.0 ? std::log(mass[r] / width) : kLogZero;
    for (std::size_t p = region_start_[r]; p < region_start_[r + 1]; ++p) log_start_[p] = v;
  }
  for (std::size_t r = 0; r < num_nulls_; ++r) {
    const double q = mass[regions + r];
    log_start_[book_.size() + r] = q > 0.0 ? std::log(q) : kLogZero;
  }
}

std::vector<double> TokenAlignModel::Reach(StateId from) const {
  const auto m = static_cast<std::int64_t>(book_.size());
  const std::size_t nb = bins_.num_bins();
  std::vector<double> reach(jump_weights_.size(), 0.0);
  if (num_nulls_ > 0) reach[nb] = 1.0;
  const bool null_source = is_null(from);
  const auto origin = static_cast<std::int64_t>(
      null_source ? NullAnchor(from - book_.size()) : from);
  for (std::size_t b = 0; b < nb; ++b) {
    auto [lo, hi] = bins_.Range(static_cast<int>(b));
    if (null_source) {
      // The outermost bins absorb every longer jump.
      if (hi == bins_.tau()) hi = m;
      if (lo == -bins_.tau()) lo = -m;
    }
    reach[b] = static_cast<double>(Overlap(lo, hi, -origin, m - 1 - origin));
  }
  return reach;
}

void TokenAlignModel::RefreshTransitions() {
  log_weights_.resize(jump_weights_.size());
  for (std::size_t b = 0; b < jump_weights_.size(); ++b) {
    log_weights_[b] = std::log(jump_weights_[b]);
  }
  log_norm_.resize(num_states());
  for (std::size_t s = 0; s < num_states(); ++s) {
    const std::vector<double> reach = Reach(static_cast<StateId>(s));
    double z = 0.0;
    for (std::size_t b = 0; b < reach.size(); ++b) z += reach[b] * jump_weights_[b];
    log_norm_[s] = std::log(z);
  }
}

void TokenAlignModel::set_jump_weights(std::span<const double> weights) {
  if (weights.size() != jump_weights_.size()) {
    throw std::invalid_argument("jump weight count differs from the model's");
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("jump weights must be finite and positive");
    }
  }
  jump_weights_.assign(weights.begin(), weights.end());
  RefreshTransitions();
}

int TokenAlignModel::TransitionBin(StateId from, StateId to) const {
  const auto nb = static_cast<int>(bins_.num_bins());
  if (is_null(to)) return nb;
  const auto q = static_cast<std::int64_t>(to);
  if (is_null(from)) {
    return bins_.ClampedBin(q - static_cast<std::int64_t>(NullAnchor(from - book_.size())));
  }
  return bins_.Bin(q - static_cast<std::int64_t>(from));
}

double TokenAlignModel::TransitionLogProb(StateId from, StateId to) const {
  if (is_null(to)) {
    const std::size_t r = to - book_.size();
    const std::size_t source_region = is_null(from) ? from - book_.size() : RegionOf(from);
    if (r != source_region) return kLogZero;
    return log_weights_[bins_.num_bins()] - log_norm_[from];
  }
  const int b = TransitionBin(from, to);
  if (b < 0) return kLogZero;
  return log_weights_[static_cast<std::size_t>(b)] - log_norm_[from];
}

double TokenAlignModel::EmissionProb(WordId source, WordId target) const {
  const auto it = emissions_.find(source);
  if (it == emissions_.end()) return 0.0;
  const auto& list = it->second;
  const auto pos = std::lower_bound(
      list.begin(), list.end(), target,
      [](const std::pair<WordId, double>& a, WordId w) { return a.first < w; });
  return pos != list.end() && pos->first == target ? pos->second : 0.0;
}

std::span<const std::pair<WordId, double>> TokenAlignModel::Translations(
    WordId source) const {
  const auto it = emissions_.find(source);
  if (it == emissions_.end()) return {};
  return it->second;
}

HmmSpec TokenAlignModel::BuildSpec(bool allow_null) const {
  HmmSpec spec;
  spec.num_states = num_states();
  spec.log_start = log_start_;
  spec.log_transition = [this](StateId from, StateId to) {
    return TransitionLogProb(from, to);
  };
  const double log_null = std::log(null_emission_);
  spec.steps.resize(obs_words_.size());
  for (std::size_t l = 0; l < obs_words_.size(); ++l) {
    LatticeStep& step = spec.steps[l];
    for (std::size_t p : candidates_[l]) {
      step.states.push_back(static_cast<StateId>(p));
      step.log_emission.push_back(std::log(EmissionProb(book_[p], obs_words_[l])));
    }
    if (allow_null) {
      for (std::size_t r = 0; r < num_nulls_; ++r) {
        step.states.push_back(static_cast<StateId>(book_.size() + r));
        step.log_emission.push_back(log_null);
      }
    }
  }
  return spec;
}

PosteriorTable TokenAlignModel::EStep(const PairVisitor& visit) const {
  return ForwardBackward(BuildSpec(true), visit);
}

double TokenAlignModel::Iterate() {
  const HmmSpec spec = BuildSpec(true);
  std::vector<double> jump_counts(jump_weights_.size(), 0.0);
  std::unordered_map<StateId, double> departures;
  const PosteriorTable post =
      ForwardBackward(spec, [&](std::size_t, StateId from, StateId to, double p) {
        jump_counts[static_cast<std::size_t>(TransitionBin(from, to))] += p;
        departures[from] += p;
      });

  // Start distribution: region masses of the first observation's posterior.
  const std::size_t regions = region_start_.size() - 1;
  std::vector<double> mass(regions + num_nulls_, 0.0);
  const LatticeStep& first = spec.steps[0];
  for (std::size_t k = 0; k < first.states.size(); ++k) {
    const StateId s = first.states[k];
    const double q = post.state_posteriors[0][k];
    if (is_null(s)) {
      mass[regions + (s - book_.size())] += q;
    } else {
      mass[RegionOf(s)] += q;
    }
  }
  SetStartFromRegions(mass);

  // Jump weights. States with identical reach vectors share one profile.
  std::map<std::vector<double>, double> grouped;
  for (const auto& [state, count] : departures) grouped[Reach(state)] += count;
  std::vector<DepartureProfile> profiles;
  profiles.reserve(grouped.size());
  for (auto& [reach, count] : grouped) profiles.push_back({reach, count});
  jump_weights_ = EstimateJumpWeights(jump_counts, profiles, jump_weights_,
                                      config_.transition_floor);
  RefreshTransitions();

  // Emissions: normalized expected translation counts per book type.
  std::unordered_map<WordId, std::unordered_map<WordId, double>> counts;
  for (std::size_t l = 0; l < spec.steps.size(); ++l) {
    const LatticeStep& step = spec.steps[l];
    for (std::size_t k = 0; k < step.states.size(); ++k) {
      const StateId s = step.states[k];
      if (is_null(s)) continue;
      const double q = post.state_posteriors[l][k];
      if (q > 0.0) counts[book_[s]][obs_words_[l]] += q;
    }
  }
  for (auto& [source, targets] : counts) {
    double total = 0.0;
    for (const auto& t : targets) total += t.second;
    if (!(total > 0.0)) continue;
    for (auto& [target, prob] : emissions_.at(source)) {
      const auto it = targets.find(target);
      prob = it == targets.end() ? 0.0 : it->second / total;
    }
  }
  return post.log_likelihood;
}

std::vector<double> TokenAlignModel::Train(
    std::size_t max_iterations, double tolerance,
    const std::function<void(std::size_t, double)>& on_iteration) {
  std::vector<double> history;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    const double ll = Iterate();
    if (on_iteration) on_iteration(it, ll);
    history.push_back(ll);
    if (history.size() >= 2 && ll - history[history.size() - 2] < tolerance) break;
  }
  return history;
}

AlignmentResult TokenAlignModel::ViterbiAlign(bool allow_null) const {
  const HmmSpec spec = BuildSpec(allow_null);
  const ViterbiPath path = Viterbi(spec);
  const PosteriorTable post = ForwardBackward(spec);
  AlignmentResult result;
  result.kind = AlignerKind::kToken;
  result.log_likelihood = post.log_likelihood;
  for (std::size_t l = 0; l < path.states.size(); ++l) {
    const StateId s = path.states[l];
    const std::vector<StateId>& states = spec.steps[l].states;
    const auto k = static_cast<std::size_t>(
        std::lower_bound(states.begin(), states.end(), s) - states.begin());
    TokenAlignment a;
    a.summary_position = obs_positions_[l];
    if (!is_null(s)) a.source_position = s;
    if (l > 0) a.bin = TransitionBin(path.states[l - 1], s);
    a.posterior = post.state_posteriors[l][k];
    result.tokens.push_back(a);
  }
  return result;
}

JingAligner::JingAligner(const TokenizedDocument& book, const TokenizedDocument& summary)
    : sentences_(book.sentences) {
  Vocabulary vocab;
  std::unordered_map<WordId, std::vector<std::size_t>> positions;
  for (const Token& t : book.tokens) {
    const WordId w = vocab.Intern(t.lower);
    positions[w].push_back(book_.size());
    book_.push_back(w);
    sentence_of_.push_back(t.sentence_index);
  }
  for (const Token& t : summary.tokens) {
    if (!t.is_content()) continue;
    const WordId w = vocab.Find(t.lower);
    if (w == kNoWord) continue;
    obs_positions_.push_back(t.doc_position);
    candidates_.push_back(positions.at(w));
  }

  const auto m = static_cast<std::int64_t>(book_.size());
  log_norm_.resize(book_.size());
  for (std::size_t p = 0; p < book_.size(); ++p) {
    const std::size_t s = sentence_of_[p];
    const SentenceRange& own = sentences_[s];
    const std::int64_t next = p + 1 < own.end ? 1 : 0;
    const auto own_size = static_cast<std::int64_t>(own.end - own.begin);
    const auto block_lo = static_cast<std::int64_t>(s > 0 ? sentences_[s - 1].begin : own.begin);
    const auto block_hi = static_cast<std::int64_t>(
        s + 1 < sentences_.size() ? sentences_[s + 1].end : own.end) - 1;
    const std::int64_t adjacent = block_hi - block_lo + 1 - own_size;
    const auto pos = static_cast<std::int64_t>(p);
    const std::int64_t lo = std::max<std::int64_t>(0, pos - kNearbyWindow);
    const std::int64_t hi = std::min(m - 1, pos + kNearbyWindow);
    const std::int64_t nearby = hi - lo + 1 - Overlap(lo, hi, block_lo, block_hi);
    const std::int64_t far = m - own_size - adjacent - nearby;
    const double z = kWeights[kNextWord] * next +
                     kWeights[kSameSentence] * (own_size - next) +
                     kWeights[kAdjacentSentence] * adjacent + kWeights[kNearby] * nearby +
                     kWeights[kFar] * far;
    log_norm_[p] = std::log(z);
  }
}

JingAligner::Category JingAligner::Classify(std::size_t from, std::size_t to) const {
  const std::size_t sf = sentence_of_[from];
  const std::size_t st = sentence_of_[to];
  if (sf == st) return to == from + 1 ? kNextWord : kSameSentence;
  if (sf + 1 == st || st + 1 == sf) return kAdjacentSentence;
  const auto d = static_cast<std::int64_t>(to) - static_cast<std::int64_t>(from);
  return (d < 0 ? -d : d) <= kNearbyWindow ? kNearby : kFar;
}

double JingAligner::TransitionLogProb(std::size_t from, std::size_t to) const {
  return std::log(kWeights[Classify(from, to)]) - log_norm_[from];
}

HmmSpec JingAligner::BuildSpec() const {
  HmmSpec spec;
  spec.num_states = book_.size();
  spec.log_start.assign(book_.size(), -std::log(static_cast<double>(book_.size())));
  spec.log_transition = [this](StateId from, StateId to) {
    return TransitionLogProb(from, to);
  };
  spec.steps.resize(candidates_.size());
  for (std::size_t l = 0; l < candidates_.size(); ++l) {
    for (std::size_t p : candidates_[l]) spec.steps[l].states.push_back(static_cast<StateId>(p));
    spec.steps[l].log_emission.assign(candidates_[l].size(), 0.0);
  }
  return spec;
}

AlignmentResult JingAligner::Align() const {
  AlignmentResult result;
  result.kind = AlignerKind::kJing;
  if (candidates_.empty()) return result;
  const HmmSpec spec = BuildSpec();
  const ViterbiPath path = Viterbi(spec);
  const PosteriorTable post = ForwardBackward(spec);
  result.log_likelihood = path.log_prob;
  for (std::size_t l = 0; l < path.states.size(); ++l) {
    const std::vector<StateId>& states = spec.steps[l].states;
    const auto k = static_cast<std::size_t>(
        std::lower_bound(states.begin(), states.end(), path.states[l]) - states.begin());
    TokenAlignment a;
    a.summary_position = obs_positions_[l];
    a.source_position = path.states[l];
    if (l > 0) a.bin = Classify(path.states[l - 1], path.states[l]);
    a.posterior = post.state_posteriors[l][k];
    result.tokens.push_back(a);
  }
  return result;
}

}  // namespace bookalign
