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

#include "bookalign/kernels.h"

#include <cmath>
#include <stdexcept>

namespace bookalign {
namespace {

double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double Margin(const SparseBinaryMatrix& x, std::size_t r,
              std::span<const double> weights, double bias) {
  double z = bias;
  for (std::uint32_t c : x.row(r)) z += weights[c];
  return z;
}

void CheckShapes(const SparseBinaryMatrix& x, std::span<const std::uint8_t> labels,
                 std::span<const double> weights, std::span<double> grad) {
  if (labels.size() != x.rows() || weights.size() != x.num_cols ||
      grad.size() != x.num_cols) {
    throw std::invalid_argument("logistic kernel shape mismatch");
  }
}

}  // namespace

std::vector<double> PassageEmissionTable(std::span<const PassageSpan> spans,
                                         std::span<const std::vector<WordId>> sentences,
                                         double alpha, std::size_t vocab_size,
                                         Execution execution) {
  const std::size_t k = spans.size();
  const std::size_t n = sentences.size();
  std::vector<double> table(n * k);
  if (execution == Execution::kSerial) {
    for (std::size_t s = 0; s < k; ++s) {
      for (std::size_t l = 0; l < n; ++l) {
        table[l * k + s] = EmissionLogProb(spans[s], sentences[l], alpha, vocab_size);
      }
    }
    return table;
  }
  const auto states = static_cast<std::ptrdiff_t>(k);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t s = 0; s < states; ++s) {
    const auto state = static_cast<std::size_t>(s);
    for (std::size_t l = 0; l < n; ++l) {
      table[l * k + state] = EmissionLogProb(spans[state], sentences[l], alpha, vocab_size);
    }
  }
  return table;
}

void SparseBinaryMatrix::AppendRow(std::span<const std::uint32_t> active) {
  for (std::uint32_t c : active) {
    if (c >= num_cols) throw std::out_of_range("feature index beyond matrix width");
  }
  cols.insert(cols.end(), active.begin(), active.end());
  row_offsets.push_back(cols.size());
}

std::vector<double> LogisticMargins(const SparseBinaryMatrix& x,
                                    std::span<const double> weights, double bias,
                                    Execution execution) {
  std::vector<double> margins(x.rows());
  if (execution == Execution::kSerial) {
    for (std::size_t r = 0; r < x.rows(); ++r) margins[r] = Margin(x, r, weights, bias);
    return margins;
  }
  const auto rows = static_cast<std::ptrdiff_t>(x.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    margins[static_cast<std::size_t>(r)] =
        Margin(x, static_cast<std::size_t>(r), weights, bias);
  }
  return margins;
}

double LogisticLossGradient(const SparseBinaryMatrix& x,
                            std::span<const std::uint8_t> labels,
                            std::span<const double> weights, double bias,
                            double lambda, std::span<double> grad_weights,
                            double* grad_bias, Execution execution) {
  CheckShapes(x, labels, weights, grad_weights);
  double penalty = 0.0;
  for (double w : weights) penalty += w * w;
  penalty *= 0.5 * lambda;

  if (execution == Execution::kSerial) {
    double loss = 0.0;
    double gb = 0.0;
    for (std::size_t c = 0; c < x.num_cols; ++c) grad_weights[c] = lambda * weights[c];
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const double z = Margin(x, r, weights, bias);
      const double y = labels[r];
      loss += Softplus(z) - y * z;
      const double residual = Sigmoid(z) - y;
      gb += residual;
      for (std::uint32_t c : x.row(r)) grad_weights[c] += residual;
    }
    *grad_bias = gb;
    return loss + penalty;
  }

  const std::size_t rows = x.rows();
  const std::size_t cols = x.num_cols;
  std::vector<double> block_loss(kReductionBlocks, 0.0);
  std::vector<double> block_bias(kReductionBlocks, 0.0);
  // Reused across calls: a fresh multi-megabyte buffer per evaluation costs
  // more in page faults than the gradient itself on small problems.
  thread_local std::vector<double> block_grad;
  block_grad.assign(kReductionBlocks * cols, 0.0);
  // Workers have their own (empty) thread_local copy; hand them this one.
  double* const scratch = block_grad.data();
  const auto blocks = static_cast<std::ptrdiff_t>(kReductionBlocks);
#pragma omp parallel for schedule(static, 1)
  for (std::ptrdiff_t bb = 0; bb < blocks; ++bb) {
    const auto b = static_cast<std::size_t>(bb);
    const std::size_t begin = b * rows / kReductionBlocks;
    const std::size_t end = (b + 1) * rows / kReductionBlocks;
    double* grad = scratch + b * cols;
    double loss = 0.0;
    double gb = 0.0;
    for (std::size_t r = begin; r < end; ++r) {
      const double z = Margin(x, r, weights, bias);
      const double y = labels[r];
      loss += Softplus(z) - y * z;
      const double residual = Sigmoid(z) - y;
      gb += residual;
      for (std::uint32_t c : x.row(r)) grad[c] += residual;
    }
    block_loss[b] = loss;
    block_bias[b] = gb;
  }
  double loss = 0.0;
  double gb = 0.0;
  for (std::size_t c = 0; c < cols; ++c) grad_weights[c] = lambda * weights[c];
  for (std::size_t b = 0; b < kReductionBlocks; ++b) {
    loss += block_loss[b];
    gb += block_bias[b];
    const double* grad = block_grad.data() + b * cols;
    for (std::size_t c = 0; c < cols; ++c) grad_weights[c] += grad[c];
  }
  *grad_bias = gb;
  return loss + penalty;
}

}  // namespace bookalign
