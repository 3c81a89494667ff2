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

// Data-parallel inner loops. Every kernel has a straightforward serial
// reference and an OpenMP variant selected by `Execution`. Element-wise
// kernels match the reference bit for bit; reductions use a fixed block
// partition summed in block order, so their result does not depend on the
// thread count and differs from the reference only by rounding.

#ifndef BOOKALIGN_KERNELS_H_
#define BOOKALIGN_KERNELS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bookalign/common.h"
#include "bookalign/passage_aligner.h"

namespace bookalign {

// Row-major num_sentences x num_spans table of EmissionLogProb values.
std::vector<double> PassageEmissionTable(std::span<const PassageSpan> spans,
                                         std::span<const std::vector<WordId>> sentences,
                                         double alpha, std::size_t vocab_size,
                                         Execution execution);

// CSR matrix with implicit 1.0 entries.
struct SparseBinaryMatrix {
  std::size_t num_cols = 0;
  std::vector<std::size_t> row_offsets{0};
  std::vector<std::uint32_t> cols;

  std::size_t rows() const { return row_offsets.size() - 1; }
  std::span<const std::uint32_t> row(std::size_t r) const {
    return {cols.data() + row_offsets[r], row_offsets[r + 1] - row_offsets[r]};
  }
  void AppendRow(std::span<const std::uint32_t> active);
};

// Fixed number of reduction blocks.
inline constexpr std::size_t kReductionBlocks = 16;

// L2-regularized logistic loss
//   sum_i [log(1 + exp(z_i)) - y_i z_i] + lambda/2 |w|^2,  z_i = b + x_i . w
// and its gradient (bias unregularized).
double LogisticLossGradient(const SparseBinaryMatrix& x,
                            std::span<const std::uint8_t> labels,
                            std::span<const double> weights, double bias,
                            double lambda, std::span<double> grad_weights,
                            double* grad_bias, Execution execution);

// z_i = b + x_i . w for every row.
std::vector<double> LogisticMargins(const SparseBinaryMatrix& x,
                                    std::span<const double> weights, double bias,
                                    Execution execution);

}  // namespace bookalign

#endif  // BOOKALIGN_KERNELS_H_
