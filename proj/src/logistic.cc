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

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace bookalign {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-20;
// Relative decrease below which the objective has reached rounding noise,
// and the number of consecutive such steps that ends the search.
constexpr double kStall = 4.0 * std::numeric_limits<double>::epsilon();
constexpr int kMaxStalls = 5;

// Parameters are packed as [w_0 .. w_{d-1}, b].
class Objective {
 public:
  Objective(const SparseBinaryMatrix& x, std::span<const std::uint8_t> labels,
            double lambda, Execution execution)
      : x_(x), labels_(labels), lambda_(lambda), execution_(execution) {}

  double operator()(std::span<const double> theta, std::span<double> grad) const {
    const std::size_t d = x_.num_cols;
    double gb = 0.0;
    const double f = LogisticLossGradient(x_, labels_, theta.first(d), theta[d], lambda_,
                                          grad.first(d), &gb, execution_);
    grad[d] = gb;
    return f;
  }

 private:
  const SparseBinaryMatrix& x_;
  std::span<const std::uint8_t> labels_;
  double lambda_;
  Execution execution_;
};

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double LogisticModel::Margin(std::span<const std::uint32_t> active) const {
  double z = bias;
  for (std::uint32_t c : active) z += weights[c];
  return z;
}

double LogisticModel::Probability(std::span<const std::uint32_t> active) const {
  const double z = Margin(active);
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LogisticModel TrainLogistic(const SparseBinaryMatrix& x,
                            std::span<const std::uint8_t> labels,
                            const LogisticConfig& config, TrainingTrace* trace) {
  if (labels.size() != x.rows()) throw InputError("one label per feature row required");
  if (!(config.lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  const std::size_t positives =
      static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(),
                                             [](std::uint8_t y) { return y != 0; }));
  if (positives == 0 || positives == labels.size()) {
    throw InputError("training data contains a single class (" +
                     std::to_string(positives) + " positives of " +
                     std::to_string(labels.size()) + ")");
  }

  const std::size_t dim = x.num_cols + 1;
  const Objective objective(x, labels, config.lambda, config.execution);
  std::vector<double> theta(dim, 0.0);
  std::vector<double> grad(dim);
  double f = objective(theta, grad);
  TrainingTrace local;
  TrainingTrace& tr = trace != nullptr ? *trace : local;
  tr = TrainingTrace{};
  tr.objective.push_back(f);

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> dir(dim), next(dim), next_grad(dim);
  double gd_step = 1.0;
  int stalls = 0;
  double gnorm = std::sqrt(Dot(grad, grad));

  while (gnorm >= config.tolerance && tr.iterations < config.max_iterations) {
    // Search direction: L-BFGS two-loop recursion, or the negative gradient.
    for (std::size_t i = 0; i < dim; ++i) dir[i] = -grad[i];
    if (config.optimizer == Optimizer::kLbfgs && !s_hist.empty()) {
      std::vector<double> alpha(s_hist.size());
      for (std::size_t k = s_hist.size(); k-- > 0;) {
        alpha[k] = rho_hist[k] * Dot(s_hist[k], dir);
        for (std::size_t i = 0; i < dim; ++i) dir[i] -= alpha[k] * y_hist[k][i];
      }
      const double gamma = Dot(s_hist.back(), y_hist.back()) / Dot(y_hist.back(), y_hist.back());
      for (double& v : dir) v *= gamma;
      for (std::size_t k = 0; k < s_hist.size(); ++k) {
        const double beta = rho_hist[k] * Dot(y_hist[k], dir);
        for (std::size_t i = 0; i < dim; ++i) dir[i] += (alpha[k] - beta) * s_hist[k][i];
      }
    }
    double slope = Dot(grad, dir);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t i = 0; i < dim; ++i) dir[i] = -grad[i];
      slope = -gnorm * gnorm;
    }

    // Backtracking line search under the Armijo condition.
    double step = config.optimizer == Optimizer::kLbfgs
                      ? (s_hist.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0)
                      : gd_step;
    double f_next = 0.0;
    bool accepted = false;
    while (step >= kMinStep) {
      for (std::size_t i = 0; i < dim; ++i) next[i] = theta[i] + step * dir[i];
      f_next = objective(next, next_grad);
      if (f_next <= f + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    stalls = f - f_next <= kStall * std::max(1.0, std::abs(f)) ? stalls + 1 : 0;

    if (config.optimizer == Optimizer::kLbfgs) {
      std::vector<double> s(dim), y(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        s[i] = next[i] - theta[i];
        y[i] = next_grad[i] - grad[i];
      }
      const double sy = Dot(s, y);
      if (sy > 1e-12 * std::sqrt(Dot(s, s) * Dot(y, y))) {
        s_hist.push_back(std::move(s));
        y_hist.push_back(std::move(y));
        rho_hist.push_back(1.0 / sy);
        if (s_hist.size() > config.history) {
          s_hist.pop_front();
          y_hist.pop_front();
          rho_hist.pop_front();
        }
      }
    } else {
      gd_step = step * 2.0;
    }
    theta.swap(next);
    grad.swap(next_grad);
    f = f_next;
    gnorm = std::sqrt(Dot(grad, grad));
    ++tr.iterations;
    tr.objective.push_back(f);
    if (stalls >= kMaxStalls) break;
  }
  tr.gradient_norm = gnorm;
  tr.converged = gnorm < config.tolerance;

  LogisticModel model;
  model.weights.assign(theta.begin(), theta.end() - 1);
  model.bias = theta.back();
  return model;
}

}  // namespace bookalign
