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

#include "bookalign/logistic.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"

namespace bookalign {
namespace {

struct Data {
  SparseBinaryMatrix x;
  std::vector<std::uint8_t> labels;
};

// Feature 0 fires mostly on positives, feature 1 mostly on negatives, the
// rest are noise.
Data Fixture(std::uint64_t seed, std::size_t rows) {
  Rng rng(seed);
  Data d;
  d.x.num_cols = 12;
  for (std::size_t r = 0; r < rows; ++r) {
    const bool y = rng.Uniform01() < 0.4;
    std::vector<std::uint32_t> active;
    if (rng.Uniform01() < (y ? 0.8 : 0.1)) active.push_back(0);
    if (rng.Uniform01() < (y ? 0.1 : 0.7)) active.push_back(1);
    for (std::uint32_t c = 2; c < 12; ++c) {
      if (rng.Uniform01() < 0.2) active.push_back(c);
    }
    d.x.AppendRow(active);
    d.labels.push_back(y ? 1 : 0);
  }
  return d;
}

double Objective(const Data& d, const LogisticModel& m, double lambda) {
  return testing::ScratchLogisticObjective(d.x, d.labels, m.weights, m.bias, lambda);
}

TEST(LogisticTest, LbfgsConvergesAndDecreases) {
  const Data d = Fixture(1, 500);
  LogisticConfig c;
  c.execution = Execution::kSerial;
  TrainingTrace trace;
  const LogisticModel m = TrainLogistic(d.x, d.labels, c, &trace);
  EXPECT_TRUE(trace.converged);
  EXPECT_LT(trace.gradient_norm, 1e-6);
  for (std::size_t i = 1; i < trace.objective.size(); ++i) {
    EXPECT_LE(trace.objective[i], trace.objective[i - 1]);
  }
  EXPECT_NEAR(trace.objective.back(), Objective(d, m, 1.0), 1e-9);
  EXPECT_GT(m.weights[0], 1.0);
  EXPECT_LT(m.weights[1], -1.0);
  for (std::size_t c2 = 2; c2 < 12; ++c2) EXPECT_LT(std::abs(m.weights[c2]), 0.6);
}

TEST(LogisticTest, GradientDescentReachesTheSameOptimum) {
  const Data d = Fixture(2, 300);
  LogisticConfig c;
  c.execution = Execution::kSerial;
  const LogisticModel lbfgs = TrainLogistic(d.x, d.labels, c);
  c.optimizer = Optimizer::kGradientDescent;
  c.max_iterations = 50000;
  c.tolerance = 1e-5;
  const LogisticModel gd = TrainLogistic(d.x, d.labels, c);
  EXPECT_NEAR(Objective(d, gd, 1.0), Objective(d, lbfgs, 1.0), 1e-6);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(gd.weights[i], lbfgs.weights[i], 1e-3);
}

TEST(LogisticTest, SeparableDataStaysFinite) {
  Data d;
  d.x.num_cols = 2;
  for (int r = 0; r < 20; ++r) {
    const std::vector<std::uint32_t> active = {static_cast<std::uint32_t>(r % 2)};
    d.x.AppendRow(active);
    d.labels.push_back(r % 2 == 0 ? 1 : 0);
  }
  LogisticConfig c;
  c.lambda = 0.1;
  const LogisticModel m = TrainLogistic(d.x, d.labels, c);
  EXPECT_TRUE(std::isfinite(m.weights[0]));
  EXPECT_GT(m.Probability(d.x.row(0)), 0.9);
  EXPECT_LT(m.Probability(d.x.row(1)), 0.1);
}

TEST(LogisticTest, HeavyPenaltyLeavesOnlyTheBaseRate) {
  const Data d = Fixture(3, 400);
  LogisticConfig c;
  c.lambda = 1e7;
  const LogisticModel m = TrainLogistic(d.x, d.labels, c);
  double positives = 0.0;
  for (std::uint8_t y : d.labels) positives += y;
  const double rate = positives / static_cast<double>(d.labels.size());
  EXPECT_NEAR(m.bias, std::log(rate / (1.0 - rate)), 1e-3);
  for (double w : m.weights) EXPECT_LT(std::abs(w), 1e-4);
}

TEST(LogisticTest, SerialAndParallelAgree) {
  const Data d = Fixture(4, 2000);
  LogisticConfig c;
  c.execution = Execution::kSerial;
  const LogisticModel s = TrainLogistic(d.x, d.labels, c);
  c.execution = Execution::kParallel;
  const LogisticModel p = TrainLogistic(d.x, d.labels, c);
  EXPECT_NEAR(p.bias, s.bias, 1e-5);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(p.weights[i], s.weights[i], 1e-5);
}

TEST(LogisticTest, BadInputs) {
  Data d = Fixture(5, 50);
  LogisticConfig c;
  std::vector<std::uint8_t> ones(d.labels.size(), 1);
  EXPECT_THROW(TrainLogistic(d.x, ones, c), InputError);
  std::vector<std::uint8_t> short_labels(d.labels.begin(), d.labels.end() - 1);
  EXPECT_THROW(TrainLogistic(d.x, short_labels, c), InputError);
  c.lambda = -1.0;
  EXPECT_THROW(TrainLogistic(d.x, d.labels, c), ConfigError);
}

}  // namespace
}  // namespace bookalign
