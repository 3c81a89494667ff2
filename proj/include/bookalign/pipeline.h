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

// Corpus-level commands behind the command-line tool. Each Run* function
// returns a process exit code: 0 on success, 1 when some pair failed or input
// was unusable. Configuration problems surface as ConfigError.
//
// Output layout under RunConfig::out:
//   tokens/<id>.{book,summary}.tok          ingest
//   alignments/<model>/<id>.align           align (plus .samples, .params)
//   models/<model>/fold_<f>.model           evaluate, summarize
//   summaries/{<model>,first-1000}/<id>.txt summarize
//   reports/...                             ingest, evaluate, report

#ifndef BOOKALIGN_PIPELINE_H_
#define BOOKALIGN_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bookalign/alignment.h"
#include "bookalign/corpus.h"
#include "bookalign/logistic.h"
#include "bookalign/passage_aligner.h"
#include "bookalign/synthetic.h"
#include "bookalign/token_aligner.h"

namespace bookalign {

struct RunConfig {
  std::filesystem::path manifest;
  std::filesystem::path out = "out";
  // Alignment directory read by evaluate/summarize/report; defaults to
  // <out>/alignments/<model>.
  std::filesystem::path align_dir;
  std::filesystem::path thesaurus;
  AlignerKind model = AlignerKind::kPassage;
  std::size_t k = 100;
  std::size_t iterations = 500;
  double alpha = 0.01;
  std::string bins = "1,2,11,101";
  std::size_t null_bins = 9;
  std::int64_t tau = 1000;
  double lambda = 1.0;
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::size_t word_budget = 1000;
  // Token-model EM stops once the log-likelihood gain falls below this.
  double token_tolerance = 1e-6;
  DecodeBoundaries decode = DecodeBoundaries::kModal;
  Optimizer optimizer = Optimizer::kLbfgs;
  AdmissionThresholds thresholds;
  bool export_features = false;

  std::filesystem::path AlignmentDir() const;
};

// Throws ConfigError on out-of-range values.
void ValidateRunConfig(const RunConfig& config);

struct LoadedPair {
  std::string id;
  TokenizedDocument book;
  TokenizedDocument summary;
};

struct LoadedCorpus {
  std::vector<LoadedPair> pairs;
  // (pair id, reason) for pairs the admission filter turned away.
  std::vector<std::pair<std::string, std::string>> rejected;
  // (pair id, error) for pairs whose files could not be read or decoded.
  std::vector<std::pair<std::string, std::string>> failed;
};

LoadedCorpus LoadCorpus(const RunConfig& config);

// Ids are sorted, shuffled with Rng(seed) and dealt round-robin into folds.
struct FoldPlan {
  std::vector<std::string> ids;
  std::vector<std::size_t> fold;  // parallel to ids
  std::size_t num_folds = 0;

  std::vector<std::string> Members(std::size_t f) const;
  std::size_t FoldOf(const std::string& id) const;
};

FoldPlan MakeFoldPlan(std::vector<std::string> ids, std::size_t folds, std::uint64_t seed);

struct PairAlignment {
  AlignmentResult result;
  BoundarySampleLog samples;  // passage model only
  std::size_t burn_in = 0;
  std::string parameters;  // empty for the fixed-parameter baseline
  std::string log;         // one line per EM iteration
};

PairAlignment AlignPair(const LoadedPair& pair, const RunConfig& config,
                        const SynonymLexicon& lexicon);

struct PairScore {
  std::string id;
  std::size_t fold = 0;
  double model_rouge1 = 0.0;
  double model_rouge2 = 0.0;
  double baseline_rouge1 = 0.0;
  double baseline_rouge2 = 0.0;
  std::size_t model_words = 0;
  std::size_t baseline_words = 0;
};

struct EvaluationReport {
  AlignerKind model = AlignerKind::kPassage;
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  std::vector<PairScore> pairs;  // sorted by id
  // Per-fold means, then their average.
  std::vector<PairScore> fold_means;
  PairScore overall;
};

struct FoldOutputs {
  // Serialized fold models, indexed by fold.
  std::vector<std::string> models;
  // Training matrices as sparse triplets; filled only with export_features.
  std::vector<std::string> feature_triplets;
  // Extracted and baseline sentence indices per test pair id.
  std::vector<std::pair<std::string, std::vector<std::size_t>>> summaries;
  std::vector<std::pair<std::string, std::vector<std::size_t>>> baselines;
};

// Trains one extractor per fold on the other folds' alignments and scores the
// held-out pairs. `alignments` is parallel to corpus.pairs.
EvaluationReport CrossValidate(const LoadedCorpus& corpus,
                               std::span<const AlignmentResult> alignments,
                               const RunConfig& config, FoldOutputs* outputs = nullptr);

void WriteEvaluationReport(std::ostream& out, const EvaluationReport& report);

int RunIngest(const RunConfig& config, std::ostream& log);
int RunAlign(const RunConfig& config, std::ostream& log);
int RunEvaluate(const RunConfig& config, std::ostream& log);
int RunSummarize(const RunConfig& config, std::ostream& log);
int RunReport(const RunConfig& config, std::ostream& log);
int RunSynth(const SyntheticConfig& config, const std::filesystem::path& out,
             std::ostream& log);

}  // namespace bookalign

#endif  // BOOKALIGN_PIPELINE_H_
