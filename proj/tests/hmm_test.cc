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

#include "bookalign/hmm.h"

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"

namespace bookalign {
namespace {

// Random dense spec with a full transition matrix.
HmmSpec RandomSpec(Rng& rng, std::size_t k, std::size_t n) {
  HmmSpec spec;
  spec.num_states = k;
  std::vector<double> start(k);
  for (double& v : start) v = rng.Uniform01() + 0.05;
  for (double p : NormalizeLogWeights([&] {
         std::vector<double> logs;
         for (double v : start) logs.push_back(std::log(v));
         return logs;
       }())) {
    spec.log_start.push_back(std::log(p));
  }
  auto table = std::make_shared<std::vector<double>>(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < k; ++j) row += (*table)[i * k + j] = rng.Uniform01() + 0.01;
    for (std::size_t j = 0; j < k; ++j) (*table)[i * k + j] = std::log((*table)[i * k + j] / row);
  }
  spec.log_transition = [table, k](StateId a, StateId b) { return (*table)[a * k + b]; };
  std::vector<double> emissions(k * n);
  for (double& e : emissions) e = std::log(rng.Uniform01() + 1e-3);
  spec.steps = DenseLattice(k, n, emissions);
  return spec;
}

TEST(ForwardBackwardTest, SingleStepHandValues) {
  HmmSpec spec;
  spec.num_states = 2;
  spec.log_start = {std::log(0.5), std::log(0.5)};
  spec.log_transition = [](StateId, StateId) { return std::log(0.5); };
  const std::vector<double> e = {std::log(0.2), std::log(0.4)};
  spec.steps = DenseLattice(2, 1, e);
  const PosteriorTable post = ForwardBackward(spec);
  EXPECT_NEAR(std::exp(post.log_likelihood), 0.3, 1e-15);
  EXPECT_NEAR(post.state_posteriors[0][0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(post.state_posteriors[0][1], 2.0 / 3.0, 1e-15);
}

TEST(ForwardBackwardTest, SymmetricSpecGivesUniformPosteriors) {
  const std::size_t k = 4;
  HmmSpec spec;
  spec.num_states = k;
  spec.log_start.assign(k, -std::log(4.0));
  spec.log_transition = [](StateId, StateId) { return -std::log(4.0); };
  std::vector<double> e;
  for (std::size_t l = 0; l < 5; ++l) {
    for (std::size_t s = 0; s < k; ++s) e.push_back(std::log(0.1 * static_cast<double>(l + 1)));
  }
  spec.steps = DenseLattice(k, 5, e);
  for (const auto& row : ForwardBackward(spec).state_posteriors) {
    for (double p : row) EXPECT_NEAR(p, 0.25, 1e-14);
  }
}

TEST(ForwardBackwardTest, MatchesEnumerationOnRandomSpecs) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const HmmSpec spec = RandomSpec(rng, 3, 4);
    const auto oracle = testing::EnumeratePaths(spec);
    const PosteriorTable post = ForwardBackward(spec);
    EXPECT_NEAR(post.log_likelihood, oracle.log_likelihood,
                1e-12 * std::abs(oracle.log_likelihood));
    EXPECT_NEAR(post.backward_log_likelihood, post.log_likelihood, 1e-10);
    for (std::size_t l = 0; l < spec.steps.size(); ++l) {
      for (std::size_t k = 0; k < spec.steps[l].states.size(); ++k) {
        EXPECT_NEAR(post.state_posteriors[l][k], oracle.marginals[l][k], 1e-12);
      }
    }
  }
}

TEST(ForwardBackwardTest, PairVisitorGivesTransitionMarginals) {
  Rng rng(5);
  const HmmSpec spec = RandomSpec(rng, 3, 4);
  std::vector<double> visited(4, 0.0);
  ForwardBackward(spec, [&](std::size_t step, StateId, StateId, double p) { visited[step] += p; });
  // Pair marginals at every step sum to one.
  for (std::size_t l = 1; l < 4; ++l) EXPECT_NEAR(visited[l], 1.0, 1e-12);
}

TEST(ForwardBackwardTest, SparseLatticeMatchesEnumeration) {
  HmmSpec spec;
  spec.num_states = 6;
  spec.log_start.assign(6, -std::log(6.0));
  // Forward-only moves within distance 2.
  spec.log_transition = [](StateId a, StateId b) {
    const int d = static_cast<int>(b) - static_cast<int>(a);
    return d >= 0 && d <= 2 ? std::log(1.0 / 3.0) : kLogZero;
  };
  spec.steps = {{{0, 2}, {std::log(0.5), std::log(0.3)}},
                {{1, 3, 4}, {std::log(0.2), std::log(0.6), std::log(0.1)}},
                {{3, 5}, {std::log(0.4), std::log(0.7)}}};
  const auto oracle = testing::EnumeratePaths(spec);
  EXPECT_NEAR(ForwardBackward(spec).log_likelihood, oracle.log_likelihood, 1e-13);
  const ViterbiPath path = Viterbi(spec);
  EXPECT_EQ(path.states, oracle.best_path);
  EXPECT_NEAR(path.log_prob, oracle.best_log_prob, 1e-13);
}

TEST(ForwardBackwardTest, UnreachableObservationNamesItsIndex) {
  HmmSpec spec;
  spec.num_states = 2;
  spec.log_start = {0.0, kLogZero};
  spec.log_transition = [](StateId a, StateId b) { return a == b ? 0.0 : kLogZero; };
  spec.steps = {{{0}, {0.0}}, {{0}, {0.0}}, {{1}, {0.0}}};
  try {
    ForwardBackward(spec);
    FAIL() << "expected InferenceError";
  } catch (const InferenceError& e) {
    EXPECT_EQ(e.observation(), 2u);
  }
  EXPECT_THROW(Viterbi(spec), InferenceError);
}

TEST(ForwardBackwardTest, NanIsALogicError) {
  HmmSpec spec;
  spec.num_states = 1;
  spec.log_start = {0.0};
  spec.log_transition = [](StateId, StateId) { return std::numeric_limits<double>::quiet_NaN(); };
  spec.steps = {{{0}, {0.0}}, {{0}, {0.0}}};
  EXPECT_THROW(ForwardBackward(spec), std::logic_error);
}

TEST(ForwardBackwardTest, MalformedSpecIsRejected) {
  HmmSpec spec;
  spec.num_states = 2;
  spec.log_start = {0.0, kLogZero};
  spec.log_transition = [](StateId, StateId) { return 0.0; };
  spec.steps = {{{1, 0}, {0.0, 0.0}}};
  EXPECT_THROW(ForwardBackward(spec), std::invalid_argument);
}

TEST(ViterbiTest, ForcedPath) {
  HmmSpec spec;
  spec.num_states = 3;
  spec.log_start.assign(3, -std::log(3.0));
  spec.log_transition = [](StateId, StateId) { return -std::log(3.0); };
  std::vector<double> e(12, kLogZero);
  const std::vector<StateId> forced = {2, 0, 0, 1};
  for (std::size_t l = 0; l < 4; ++l) e[l * 3 + forced[l]] = 0.0;
  spec.steps = DenseLattice(3, 4, e);
  EXPECT_EQ(Viterbi(spec).states, forced);
}

TEST(ViterbiTest, MatchesEnumerationAndNeverExceedsLikelihood) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const HmmSpec spec = RandomSpec(rng, 3, 4);
    const auto oracle = testing::EnumeratePaths(spec);
    const ViterbiPath path = Viterbi(spec);
    EXPECT_EQ(path.states, oracle.best_path);
    EXPECT_NEAR(path.log_prob, oracle.best_log_prob, 1e-12 * std::abs(oracle.best_log_prob));
    EXPECT_LE(path.log_prob, ForwardBackward(spec).log_likelihood + 1e-12);
  }
}

TEST(ViterbiTest, TiesGoToTheLowerState) {
  HmmSpec spec;
  spec.num_states = 3;
  spec.log_start.assign(3, -std::log(3.0));
  spec.log_transition = [](StateId, StateId) { return -std::log(3.0); };
  const std::vector<double> e(6, std::log(0.5));
  spec.steps = DenseLattice(3, 2, e);
  EXPECT_EQ(Viterbi(spec).states, (std::vector<StateId>{0, 0}));
}

TEST(JumpWeightsTest, SharedReachGivesRelativeFrequencies) {
  // Every departure can reach every bin, so the estimate is proportional to
  // the counts.
  const std::vector<double> counts = {8.0, 2.0};
  const std::vector<DepartureProfile> profiles = {{{1.0, 1.0}, 10.0}};
  const std::vector<double> start = {0.5, 0.5};
  const auto w = EstimateJumpWeights(counts, profiles, start, 0.0);
  EXPECT_NEAR(w[0] / (w[0] + w[1]), 0.8, 1e-9);
}

TEST(JumpWeightsTest, PartialReachCorrectsRelativeFrequency) {
  // Half of the departures cannot reach bin 1; its weight must rise above the
  // naive count share to explain the transitions that did use it.
  const std::vector<double> counts = {6.0, 4.0};
  const std::vector<DepartureProfile> profiles = {{{1.0, 1.0}, 5.0}, {{1.0, 0.0}, 5.0}};
  const std::vector<double> start = {0.5, 0.5};
  const auto w = EstimateJumpWeights(counts, profiles, start, 0.0, 2000);
  // With w0 + w1 = 1 and x = w1 the objective is log(1 - x) + 4 log x,
  // maximized at x = 4/5 rather than the naive 4/10.
  EXPECT_NEAR(w[1] / (w[0] + w[1]), 0.8, 1e-6);
}

TEST(JumpWeightsTest, NeverDecreasesObjective) {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t bins = 2 + rng.Below(6);
    std::vector<double> counts(bins);
    for (double& c : counts) c = rng.Uniform01() < 0.3 ? 0.0 : 10.0 * rng.Uniform01();
    std::vector<DepartureProfile> profiles(1 + rng.Below(4));
    for (auto& p : profiles) {
      p.reach.resize(bins);
      for (double& r : p.reach) r = rng.Uniform01() < 0.2 ? 0.0 : static_cast<double>(rng.Below(50));
      p.reach[0] = 1.0;
      p.departures = 5.0 * rng.Uniform01();
    }
    const double floor = rng.Uniform01() < 0.5 ? 0.0 : 0.05;
    std::vector<double> current(bins);
    for (double& c : current) c = floor + rng.Uniform01() + 0.01;
    const auto next = EstimateJumpWeights(counts, profiles, current, floor, 50);
    EXPECT_GE(JumpObjective(counts, profiles, next),
              JumpObjective(counts, profiles, current) - 1e-9);
    for (double v : next) EXPECT_GE(v, floor * (1.0 - 1e-12));
  }
}

TEST(JumpWeightsTest, NoCountsKeepsCurrentWeights) {
  const std::vector<double> counts = {0.0, 0.0, 0.0};
  const std::vector<DepartureProfile> profiles = {{{1.0, 1.0, 1.0}, 0.0}};
  const std::vector<double> current = {0.2, 0.3, 0.5};
  EXPECT_EQ(EstimateJumpWeights(counts, profiles, current, 0.01), current);
}

}  // namespace
}  // namespace bookalign
