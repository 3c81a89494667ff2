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

#include "bookalign/common.h"

#include <algorithm>

namespace bookalign {

std::vector<double> NormalizeLogWeights(std::span<const double> log_weights) {
  std::vector<double> probs(log_weights.size(), 0.0);
  if (log_weights.empty()) return probs;
  double max = kLogZero;
  for (double v : log_weights) max = std::max(max, v);
  if (max == kLogZero) {
    std::fill(probs.begin(), probs.end(), 1.0 / probs.size());
    return probs;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = std::exp(log_weights[i] - max);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::size_t SampleIndex(std::span<const double> probabilities, double u) {
  double total = 0.0;
  for (double p : probabilities) total += p;
  const double target = u * total;
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    last_positive = i;
    cumulative += probabilities[i];
    if (target < cumulative) return i;
  }
  return last_positive;
}

std::uint64_t Rng::Below(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t draw;
  do {
    draw = Next();
  } while (draw >= limit);
  return draw % n;
}

std::uint64_t Fnv1a(std::string_view text, std::uint64_t seed) {
  std::uint64_t hash = 14695981039346656037ULL ^ seed;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

WordId Vocabulary::Intern(std::string_view word) {
  auto it = index_.find(std::string(word));
  if (it != index_.end()) return it->second;
  const auto id = static_cast<WordId>(words_.size());
  words_.emplace_back(word);
  index_.emplace(words_.back(), id);
  return id;
}

WordId Vocabulary::Find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kNoWord : it->second;
}

}  // namespace bookalign
