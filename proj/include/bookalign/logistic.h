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

// Binary logistic regression over sparse binary features with an L2 penalty
// on the weights (not the bias).

#ifndef BOOKALIGN_LOGISTIC_H_
#define BOOKALIGN_LOGISTIC_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bookalign/common.h"
#include "bookalign/kernels.h"

namespace bookalign {

enum class Optimizer { kLbfgs, kGradientDescent };

struct LogisticConfig {
  double lambda = 1.0;
  Optimizer optimizer = Optimizer::kLbfgs;
  // Stop once the gradient norm of the summed objective drops below this.
  double tolerance = 1e-6;
  std::size_t max_iterations = 1000;
  std::size_t history = 10;
  Execution execution = Execution::kParallel;
};

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;

  double Margin(std::span<const std::uint32_t> active) const;
  double Probability(std::span<const std::uint32_t> active) const;
};

struct TrainingTrace {
  // Objective before the first step and after every accepted step.
  std::vector<double> objective;
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Throws InputError when the labels contain a single class or the shapes
// disagree, ConfigError on a negative lambda.
LogisticModel TrainLogistic(const SparseBinaryMatrix& x,
                            std::span<const std::uint8_t> labels,
                            const LogisticConfig& config,
                            TrainingTrace* trace = nullptr);

}  // namespace bookalign

#endif  // BOOKALIGN_LOGISTIC_H_
