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

// Slow, obviously-correct reference computations shared by the unit tests and
// the acceptance binary.

#ifndef BOOKALIGN_TESTS_ORACLES_H_
#define BOOKALIGN_TESTS_ORACLES_H_

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bookalign/common.h"
#include "bookalign/hmm.h"
#include "bookalign/kernels.h"

namespace bookalign::testing {

// Every state path of a lattice, scored in log space.
struct Enumeration {
  double log_likelihood = kLogZero;
  std::vector<StateId> best_path;
  double best_log_prob = kLogZero;
  // marginals[l][k] for steps[l].states[k]
  std::vector<std::vector<double>> marginals;
};

inline Enumeration EnumeratePaths(const HmmSpec& spec) {
  Enumeration e;
  const std::size_t n = spec.steps.size();
  e.marginals.resize(n);
  for (std::size_t l = 0; l < n; ++l) e.marginals[l].assign(spec.steps[l].states.size(), 0.0);
  std::vector<std::size_t> choice(n, 0);
  std::vector<double> path_logs;
  std::vector<std::vector<std::size_t>> paths;
  while (true) {
    double lp = spec.log_start[spec.steps[0].states[choice[0]]] +
                spec.steps[0].log_emission[choice[0]];
    for (std::size_t l = 1; l < n; ++l) {
      lp += spec.log_transition(spec.steps[l - 1].states[choice[l - 1]],
                                spec.steps[l].states[choice[l]]) +
            spec.steps[l].log_emission[choice[l]];
    }
    path_logs.push_back(lp);
    paths.push_back(choice);
    // Paths are visited in lexicographic order of state ids, so a strict
    // comparison keeps the first (lowest-id) maximizer.
    if (lp > e.best_log_prob) {
      e.best_log_prob = lp;
      e.best_path.clear();
      for (std::size_t l = 0; l < n; ++l) e.best_path.push_back(spec.steps[l].states[choice[l]]);
    }
    bool done = true;
    for (std::size_t l = n; l-- > 0;) {
      if (++choice[l] < spec.steps[l].states.size()) {
        done = false;
        break;
      }
      choice[l] = 0;
    }
    if (done) break;
  }
  e.log_likelihood = LogSumExp(path_logs);
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const double w = std::exp(path_logs[p] - e.log_likelihood);
    for (std::size_t l = 0; l < n; ++l) e.marginals[l][paths[p][l]] += w;
  }
  return e;
}

// Smoothed unigram log-probability of a sentence under a span, recomputed from
// raw counts.
inline double ScratchEmission(std::span<const WordId> book, std::size_t start, std::size_t end,
                              std::span<const WordId> sentence, double alpha,
                              std::size_t vocab_size) {
  std::map<WordId, double> freq;
  for (std::size_t i = start; i <= end; ++i) freq[book[i]] += 1.0;
  const double length = static_cast<double>(end - start + 1);
  double lp = 0.0;
  for (WordId w : sentence) {
    const double f = freq.count(w) != 0 ? freq[w] : 0.0;
    lp += std::log((f + alpha) / (length + alpha * static_cast<double>(vocab_size)));
  }
  return lp;
}

// Summed logistic loss with L2 on the weights, computed directly.
inline double ScratchLogisticObjective(const SparseBinaryMatrix& x,
                                       std::span<const std::uint8_t> labels,
                                       std::span<const double> weights, double bias,
                                       double lambda) {
  double total = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double z = bias;
    for (std::uint32_t c : x.row(r)) z += weights[c];
    const double p = 1.0 / (1.0 + std::exp(-z));
    total -= labels[r] != 0 ? std::log(p) : std::log1p(-p);
  }
  double sq = 0.0;
  for (double w : weights) sq += w * w;
  return total + 0.5 * lambda * sq;
}

}  // namespace bookalign::testing

#endif  // BOOKALIGN_TESTS_ORACLES_H_
