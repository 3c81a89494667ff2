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

// Serial reference vs. OpenMP variant of each kernel. The second argument of
// every benchmark selects the variant: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "bookalign/common.h"
#include "bookalign/kernels.h"
#include "bookalign/passage_aligner.h"

namespace bookalign {
namespace {

Execution Mode(const benchmark::State& state) {
  return state.range(1) == 0 ? Execution::kSerial : Execution::kParallel;
}

// A book of `states` spans of 400 tokens and 300 summary sentences.
struct EmissionFixture {
  std::vector<WordId> book;
  std::vector<PassageSpan> spans;
  std::vector<std::vector<WordId>> sentences;
  std::size_t vocab = 5000;

  explicit EmissionFixture(std::size_t states) {
    Rng rng(1);
    book.resize(states * 400);
    for (WordId& w : book) w = static_cast<WordId>(rng.Below(vocab));
    for (std::size_t s = 0; s < states; ++s) {
      spans.push_back({s, 400 * s, 400 * s + 399, CountWords(book, 400 * s, 400 * s + 399)});
    }
    sentences.resize(300);
    for (auto& sentence : sentences) {
      sentence.resize(8 + rng.Below(10));
      for (WordId& w : sentence) w = static_cast<WordId>(rng.Below(vocab));
    }
  }
};

void BM_PassageEmissionTable(benchmark::State& state) {
  const EmissionFixture f(static_cast<std::size_t>(state.range(0)));
  const Execution mode = Mode(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        PassageEmissionTable(f.spans, f.sentences, 0.01, f.vocab, mode));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 300);
}
BENCHMARK(BM_PassageEmissionTable)
    ->ArgsProduct({{25, 100}, {0, 1}})
    ->ArgNames({"states", "parallel"})
    ->Unit(benchmark::kMicrosecond);

// Sentence-feature matrix shaped like a training fold: a few dozen active
// features per row out of the full layout width.
struct LogisticFixture {
  SparseBinaryMatrix x;
  std::vector<std::uint8_t> labels;
  std::vector<double> weights;
  std::vector<double> grad;

  explicit LogisticFixture(std::size_t rows) {
    Rng rng(2);
    x.num_cols = 20113;
    std::vector<std::uint32_t> active;
    for (std::size_t r = 0; r < rows; ++r) {
      active.clear();
      for (int k = 0; k < 40; ++k) active.push_back(static_cast<std::uint32_t>(rng.Below(20113)));
      std::sort(active.begin(), active.end());
      active.erase(std::unique(active.begin(), active.end()), active.end());
      x.AppendRow(active);
      labels.push_back(rng.Uniform01() < 0.1 ? 1 : 0);
    }
    weights.resize(x.num_cols);
    for (double& w : weights) w = 0.1 * (rng.Uniform01() - 0.5);
    grad.resize(x.num_cols);
  }
};

void BM_LogisticLossGradient(benchmark::State& state) {
  LogisticFixture f(static_cast<std::size_t>(state.range(0)));
  const Execution mode = Mode(state);
  double grad_bias = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(LogisticLossGradient(f.x, f.labels, f.weights, -1.0, 1.0, f.grad,
                                                  &grad_bias, mode));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogisticLossGradient)
    ->ArgsProduct({{10000, 100000}, {0, 1}})
    ->ArgNames({"rows", "parallel"})
    ->Unit(benchmark::kMicrosecond);

void BM_LogisticMargins(benchmark::State& state) {
  const LogisticFixture f(static_cast<std::size_t>(state.range(0)));
  const Execution mode = Mode(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(LogisticMargins(f.x, f.weights, -1.0, mode));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogisticMargins)
    ->ArgsProduct({{100000}, {0, 1}})
    ->ArgNames({"rows", "parallel"})
    ->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace bookalign

BENCHMARK_MAIN();
