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

#include "bookalign/pipeline.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "bookalign/common.h"
#include "bookalign/rouge.h"
#include "bookalign/summarizer.h"

namespace bookalign {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kBaselineName = "first-1000";
constexpr std::size_t kTopFeatures = 25;

std::string Printf(const char* format, auto... args) {
  const int n = std::snprintf(nullptr, 0, format, args...);
  std::string out(static_cast<std::size_t>(n), '\0');
  std::snprintf(out.data(), out.size() + 1, format, args...);
  return out;
}

void WriteFile(const fs::path& path, std::string_view contents) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << contents;
  if (!out) throw InputError("write failed for " + path.string());
}

int Threads(std::size_t workers) { return static_cast<int>(std::max<std::size_t>(workers, 1)); }

std::string PassageParameters(const PassageModel& model, const std::string& id) {
  std::string out = Printf("# model=passage pair=%s states=%zu\n", id.c_str(), model.num_states());
  for (const PassageSpan& span : model.spans()) {
    out += Printf("span\t%zu\t%zu\t%zu\n", span.state, span.start, span.end);
  }
  for (std::size_t s = 0; s < model.num_states(); ++s) {
    out += Printf("start\t%zu\t%.17g\n", s, model.log_start()[s]);
  }
  const auto k = static_cast<long long>(model.num_states());
  for (std::size_t i = 0; i < model.jump_weights().size(); ++i) {
    out += Printf("jump\t%lld\t%.17g\n", static_cast<long long>(i) - (k - 1),
                  model.jump_weights()[i]);
  }
  return out;
}

std::string TokenParameters(const TokenAlignModel& model, const std::string& id) {
  std::string out = Printf("# model=token pair=%s positions=%zu nulls=%zu\n", id.c_str(),
                           model.num_positions(), model.num_nulls());
  const auto weights = model.jump_weights();
  for (std::size_t b = 0; b < model.bins().num_bins(); ++b) {
    out += Printf("jump\t%s\t%.17g\n", model.bins().Describe(static_cast<int>(b)).c_str(),
                  weights[b]);
  }
  if (weights.size() > model.bins().num_bins()) {
    out += Printf("jump\tnull\t%.17g\n", weights.back());
  }
  out += Printf("null_emission\t%.17g\n", model.NullEmissionProb());
  const Vocabulary& vocab = model.vocabulary();
  std::set<std::string> sources;
  for (WordId w : model.book_words()) sources.insert(vocab.Word(w));
  for (const std::string& word : sources) {
    const auto translations = model.Translations(vocab.Find(word));
    if (translations.size() < 2) continue;
    std::vector<std::pair<std::string, double>> sorted;
    for (const auto& [target, p] : translations) sorted.emplace_back(vocab.Word(target), p);
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [target, p] : sorted) {
      out += Printf("emit\t%s\t%s\t%.17g\n", word.c_str(), target.c_str(), p);
    }
  }
  return out;
}

std::string SummaryText(const TokenizedDocument& doc, std::span<const std::size_t> sentences) {
  std::string out;
  for (std::size_t s : sentences) {
    const SentenceRange& range = doc.sentences[s];
    std::string line;
    for (std::size_t i = range.begin; i < range.end; ++i) {
      if (!line.empty() && !doc.tokens[i].is_punct) line += ' ';
      line += doc.tokens[i].surface;
    }
    out += line + '\n';
  }
  return out;
}

void Accumulate(PairScore& into, const PairScore& score) {
  into.model_rouge1 += score.model_rouge1;
  into.model_rouge2 += score.model_rouge2;
  into.baseline_rouge1 += score.baseline_rouge1;
  into.baseline_rouge2 += score.baseline_rouge2;
  into.model_words += score.model_words;
  into.baseline_words += score.baseline_words;
}

void Scale(PairScore& score, double factor) {
  score.model_rouge1 *= factor;
  score.model_rouge2 *= factor;
  score.baseline_rouge1 *= factor;
  score.baseline_rouge2 *= factor;
}

std::vector<AlignmentResult> ReadAlignments(const LoadedCorpus& corpus, const fs::path& dir) {
  std::vector<AlignmentResult> alignments;
  std::vector<std::string> missing;
  for (const LoadedPair& pair : corpus.pairs) {
    std::ifstream in(dir / (pair.id + ".align"));
    if (!in) {
      missing.push_back(pair.id);
      continue;
    }
    alignments.push_back(ReadAlignment(in));
    if (alignments.back().pair_id != pair.id) {
      throw InputError("alignment file for '" + pair.id + "' names pair '" +
                       alignments.back().pair_id + "'");
    }
  }
  if (!missing.empty()) {
    std::string names;
    for (const std::string& id : missing) names += (names.empty() ? "" : ", ") + id;
    throw InputError("missing alignments under " + dir.string() + " for pairs: " + names);
  }
  return alignments;
}

void LogLoadProblems(const LoadedCorpus& corpus, std::ostream& log) {
  for (const auto& [id, reason] : corpus.rejected) {
    log << "pair=" << id << " rejected: " << reason << '\n';
  }
  for (const auto& [id, error] : corpus.failed) {
    log << "pair=" << id << " failed: " << error << '\n';
  }
}

int RunCrossValidation(const RunConfig& config, std::ostream& log, bool write_summaries) {
  ValidateRunConfig(config);
  const LoadedCorpus corpus = LoadCorpus(config);
  LogLoadProblems(corpus, log);
  const std::vector<AlignmentResult> alignments = ReadAlignments(corpus, config.AlignmentDir());
  FoldOutputs outputs;
  const EvaluationReport report = CrossValidate(corpus, alignments, config, &outputs);

  const std::string model_name(AlignerName(config.model));
  for (std::size_t f = 0; f < outputs.models.size(); ++f) {
    WriteFile(config.out / "models" / model_name / Printf("fold_%zu.model", f),
              outputs.models[f]);
    if (config.export_features) {
      WriteFile(config.out / "features" / model_name / Printf("fold_%zu.tsv", f),
                outputs.feature_triplets[f]);
    }
  }
  std::ostringstream text;
  WriteEvaluationReport(text, report);
  const fs::path report_path = config.out / "reports" / ("evaluate_" + model_name + ".tsv");
  WriteFile(report_path, text.str());
  log << "report=" << report_path.string() << '\n';

  if (write_summaries) {
    std::map<std::string, const LoadedPair*> by_id;
    for (const LoadedPair& pair : corpus.pairs) by_id.emplace(pair.id, &pair);
    const auto emit = [&](std::string_view system, const auto& chosen) {
      for (const auto& [id, sentences] : chosen) {
        const TokenizedDocument& book = by_id.at(id)->book;
        WriteFile(config.out / "summaries" / std::string(system) / (id + ".txt"),
                  Printf("# pair=%s words=%zu\n", id.c_str(), WordCount(book, sentences)) +
                      SummaryText(book, sentences));
      }
    };
    emit(model_name, outputs.summaries);
    emit(kBaselineName, outputs.baselines);
    log << "summaries=" << (config.out / "summaries").string() << '\n';
  }
  return corpus.failed.empty() ? 0 : 1;
}

// Boundary histogram of one sample log: rows "state side position count",
// counting post-burn-in samples.
std::string BoundaryHistogram(const std::string& id, const BoundarySampleLog& samples,
                              std::size_t burn_in) {
  std::string out = Printf("# pair=%s states=%zu iterations=%zu burn_in=%zu\n", id.c_str(),
                           samples.num_states, samples.samples.size(), burn_in);
  out += "state\tside\tposition\tcount\n";
  for (std::size_t s = 0; s < samples.num_states; ++s) {
    std::map<std::size_t, std::size_t> left;
    std::map<std::size_t, std::size_t> right;
    for (std::size_t it = burn_in; it < samples.samples.size(); ++it) {
      ++left[samples.samples[it][s].first];
      ++right[samples.samples[it][s].second];
    }
    for (const auto& [position, count] : left) {
      out += Printf("%zu\tleft\t%zu\t%zu\n", s, position, count);
    }
    for (const auto& [position, count] : right) {
      out += Printf("%zu\tright\t%zu\t%zu\n", s, position, count);
    }
  }
  return out;
}

}  // namespace

fs::path RunConfig::AlignmentDir() const {
  if (!align_dir.empty()) return align_dir;
  return out / "alignments" / std::string(AlignerName(model));
}

void ValidateRunConfig(const RunConfig& config) {
  if (config.k == 0) throw ConfigError("--k must be positive");
  if (config.iterations == 0) throw ConfigError("--iters must be positive");
  if (!(config.alpha >= 0.0) || !std::isfinite(config.alpha)) {
    throw ConfigError("--alpha must be a finite non-negative number");
  }
  if (config.tau < 1) throw ConfigError("--tau must be at least 1");
  BinningScheme::Parse(config.bins, config.tau);
  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) {
    throw ConfigError("--lambda must be a finite non-negative number");
  }
  if (config.folds < 2) throw ConfigError("--folds must be at least 2 to hold out a fold");
  if (config.workers == 0) throw ConfigError("--workers must be positive");
  if (config.word_budget == 0) throw ConfigError("summary word budget must be positive");
  if (config.out.empty()) throw ConfigError("--out must name a directory");
}

LoadedCorpus LoadCorpus(const RunConfig& config) {
  const std::vector<ManifestEntry> entries = ReadManifest(config.manifest);
  std::set<std::string> seen;
  for (const ManifestEntry& entry : entries) {
    if (!seen.insert(entry.id).second) {
      throw InputError("manifest lists pair '" + entry.id + "' twice");
    }
  }
  const WordSet& stopwords = DefaultStopwords();
  const WordSet& abbreviations = DefaultAbbreviations();
  std::vector<std::optional<AdmissionResult>> results(entries.size());
  std::vector<std::string> errors(entries.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(Threads(config.workers))
  for (std::size_t i = 0; i < entries.size(); ++i) {
    try {
      const std::string book_text = ReadTextFile(entries[i].book);
      const std::string summary_text = ReadTextFile(entries[i].summary);
      TokenizedDocument book = Tokenize(StripGutenbergBoilerplate(book_text), stopwords,
                                        abbreviations, entries[i].id);
      TokenizedDocument summary = Tokenize(summary_text, stopwords, abbreviations,
                                           entries[i].id);
      results[i] = AdmitPair(std::move(book), std::move(summary), config.thresholds);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }

  LoadedCorpus corpus;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!results[i]) {
      corpus.failed.emplace_back(entries[i].id, errors[i]);
    } else if (auto* rejection = std::get_if<PairRejection>(&*results[i])) {
      corpus.rejected.emplace_back(entries[i].id, rejection->Message());
    } else {
      auto& admitted = std::get<BookSummaryPair>(*results[i]);
      corpus.pairs.push_back(
          {entries[i].id, std::move(admitted.book), std::move(admitted.summary)});
    }
  }
  std::sort(corpus.pairs.begin(), corpus.pairs.end(),
            [](const LoadedPair& a, const LoadedPair& b) { return a.id < b.id; });
  return corpus;
}

std::vector<std::string> FoldPlan::Members(std::size_t f) const {
  std::vector<std::string> members;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (fold[i] == f) members.push_back(ids[i]);
  }
  std::sort(members.begin(), members.end());
  return members;
}

std::size_t FoldPlan::FoldOf(const std::string& id) const {
  const auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw std::out_of_range("pair '" + id + "' is not in the fold plan");
  return fold[static_cast<std::size_t>(it - ids.begin())];
}

FoldPlan MakeFoldPlan(std::vector<std::string> ids, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (folds > ids.size()) {
    throw ConfigError(Printf("%zu folds requested for %zu pairs", folds, ids.size()));
  }
  std::sort(ids.begin(), ids.end());
  Rng rng(seed);
  for (std::size_t i = ids.size(); i > 1; --i) {
    std::swap(ids[i - 1], ids[rng.Below(i)]);
  }
  FoldPlan plan;
  plan.num_folds = folds;
  plan.fold.resize(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) plan.fold[i] = i % folds;
  plan.ids = std::move(ids);
  return plan;
}

PairAlignment AlignPair(const LoadedPair& pair, const RunConfig& config,
                        const SynonymLexicon& lexicon) {
  using Clock = std::chrono::steady_clock;
  const auto begin = Clock::now();
  PairAlignment out;
  const auto on_iteration = [&](std::size_t iteration, double loglik) {
    const double seconds = std::chrono::duration<double>(Clock::now() - begin).count();
    out.log += Printf("pair=%s iter=%zu loglik=%.6f seconds=%.3f\n", pair.id.c_str(),
                      iteration, loglik, seconds);
  };
  // Nested regions would oversubscribe when pairs already run in parallel.
  const Execution execution = config.workers > 1 ? Execution::kSerial : Execution::kParallel;

  switch (config.model) {
    case AlignerKind::kPassage: {
      PassageConfig pc;
      pc.num_states = config.k;
      pc.alpha = config.alpha;
      pc.seed = Fnv1a(pair.id, config.seed);
      pc.execution = execution;
      PassageModel model(pair.book, pair.summary, pc);
      model.Train(config.iterations, on_iteration);
      out.result = model.Decode(config.decode);
      out.samples = model.sample_log();
      out.burn_in = out.samples.BurnIn(pc.burn_in_fraction);
      out.parameters = PassageParameters(model, pair.id);
      break;
    }
    case AlignerKind::kToken: {
      TokenConfig tc;
      tc.tau = config.tau;
      const BinningScheme bins = BinningScheme::Parse(config.bins, config.tau);
      tc.bin_edges.assign(bins.edges().begin(), bins.edges().end());
      tc.null_bins = config.null_bins;
      TokenAlignModel model(pair.book, pair.summary, lexicon, tc);
      model.Train(config.iterations, config.token_tolerance, on_iteration);
      out.result = model.ViterbiAlign();
      out.parameters = TokenParameters(model, pair.id);
      break;
    }
    case AlignerKind::kJing:
      out.result = JingAligner(pair.book, pair.summary).Align();
      break;
  }
  out.result.pair_id = pair.id;
  out.result.kind = config.model;
  return out;
}

EvaluationReport CrossValidate(const LoadedCorpus& corpus,
                               std::span<const AlignmentResult> alignments,
                               const RunConfig& config, FoldOutputs* outputs) {
  if (alignments.size() != corpus.pairs.size()) {
    throw std::invalid_argument("one alignment per pair required");
  }
  std::vector<std::string> ids;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < corpus.pairs.size(); ++i) {
    ids.push_back(corpus.pairs[i].id);
    index.emplace(corpus.pairs[i].id, i);
  }
  const FoldPlan plan = MakeFoldPlan(ids, config.folds, config.seed);
  const std::size_t folds = plan.num_folds;
  const Execution execution = config.workers > 1 ? Execution::kSerial : Execution::kParallel;

  std::vector<std::vector<PairScore>> fold_scores(folds);
  std::vector<std::string> models(folds);
  std::vector<std::string> triplets(folds);
  std::vector<std::vector<std::pair<std::string, std::vector<std::size_t>>>> chosen(folds);
  std::vector<std::vector<std::pair<std::string, std::vector<std::size_t>>>> baseline(folds);
  std::vector<std::string> errors(folds);

#pragma omp parallel for schedule(dynamic, 1) num_threads(Threads(config.workers))
  for (std::size_t f = 0; f < folds; ++f) {
    try {
      const std::vector<std::string> test_ids = plan.Members(f);
      std::vector<std::size_t> train;
      for (std::size_t i = 0; i < plan.ids.size(); ++i) {
        if (plan.fold[i] != f) train.push_back(index.at(plan.ids[i]));
      }
      std::sort(train.begin(), train.end());

      std::vector<const TokenizedDocument*> books;
      for (std::size_t i : train) books.push_back(&corpus.pairs[i].book);
      const FeatureSpace space = FeatureSpace::Build(books);
      // Held-out pairs must not influence the vocabulary, document frequencies
      // or labels the extractor is trained on.
      for (const std::string& id : test_ids) {
        const auto sources = space.source_ids();
        if (std::binary_search(sources.begin(), sources.end(), id)) {
          throw std::logic_error("held-out pair '" + id + "' leaked into training statistics");
        }
        for (std::size_t i : train) {
          if (corpus.pairs[i].id == id) {
            throw std::logic_error("held-out pair '" + id + "' is in the training set");
          }
        }
      }

      SparseBinaryMatrix x;
      x.num_cols = kFeatureDim;
      std::vector<std::uint8_t> labels;
      for (std::size_t i : train) {
        const LoadedPair& pair = corpus.pairs[i];
        const auto features = Featurize(pair.book, space);
        const auto y = LabelsFromAlignment(pair.book, pair.summary, alignments[i], config.alpha);
        for (std::size_t s = 0; s < features.size(); ++s) {
          x.AppendRow(features[s]);
          labels.push_back(y[s]);
        }
      }
      LogisticConfig lc;
      lc.lambda = config.lambda;
      lc.optimizer = config.optimizer;
      lc.execution = execution;
      const LogisticModel model = TrainLogistic(x, labels, lc);

      std::ostringstream model_text;
      WriteModel(model_text, space, model);
      models[f] = model_text.str();
      if (outputs != nullptr && config.export_features) {
        std::ostringstream text;
        WriteFeatureTriplets(text, space, x, labels);
        triplets[f] = text.str();
      }

      for (const std::string& id : test_ids) {
        const LoadedPair& pair = corpus.pairs[index.at(id)];
        const auto features = Featurize(pair.book, space);
        std::vector<double> scores(features.size());
        for (std::size_t s = 0; s < features.size(); ++s) scores[s] = model.Margin(features[s]);
        const auto extracted = ExtractSummary(pair.book, scores, config.word_budget);
        const auto first = FirstNBaseline(pair.book, config.word_budget);
        const auto reference = RougeTokens(pair.summary);
        const auto model_tokens = RougeTokens(pair.book, extracted);
        const auto first_tokens = RougeTokens(pair.book, first);
        PairScore score;
        score.id = id;
        score.fold = f;
        score.model_rouge1 = RougeN(reference, model_tokens, 1).recall();
        score.model_rouge2 = RougeN(reference, model_tokens, 2).recall();
        score.baseline_rouge1 = RougeN(reference, first_tokens, 1).recall();
        score.baseline_rouge2 = RougeN(reference, first_tokens, 2).recall();
        score.model_words = WordCount(pair.book, extracted);
        score.baseline_words = WordCount(pair.book, first);
        fold_scores[f].push_back(score);
        chosen[f].emplace_back(id, extracted);
        baseline[f].emplace_back(id, first);
      }
    } catch (const std::exception& e) {
      errors[f] = e.what();
    }
  }
  for (std::size_t f = 0; f < folds; ++f) {
    if (!errors[f].empty()) throw InputError(Printf("fold %zu: %s", f, errors[f].c_str()));
  }

  EvaluationReport report;
  report.model = config.model;
  report.folds = folds;
  report.seed = config.seed;
  for (std::size_t f = 0; f < folds; ++f) {
    PairScore mean;
    mean.id = Printf("fold_%zu", f);
    mean.fold = f;
    for (const PairScore& score : fold_scores[f]) {
      Accumulate(mean, score);
      report.pairs.push_back(score);
    }
    Scale(mean, 1.0 / static_cast<double>(fold_scores[f].size()));
    report.fold_means.push_back(mean);
    Accumulate(report.overall, mean);
  }
  Scale(report.overall, 1.0 / static_cast<double>(folds));
  report.overall.id = "MEAN";
  std::sort(report.pairs.begin(), report.pairs.end(),
            [](const PairScore& a, const PairScore& b) { return a.id < b.id; });

  if (outputs != nullptr) {
    outputs->models = std::move(models);
    outputs->feature_triplets = std::move(triplets);
    outputs->summaries.clear();
    outputs->baselines.clear();
    for (std::size_t f = 0; f < folds; ++f) {
      for (auto& entry : chosen[f]) outputs->summaries.push_back(std::move(entry));
      for (auto& entry : baseline[f]) outputs->baselines.push_back(std::move(entry));
    }
    std::sort(outputs->summaries.begin(), outputs->summaries.end());
    std::sort(outputs->baselines.begin(), outputs->baselines.end());
  }
  return report;
}

void WriteEvaluationReport(std::ostream& out, const EvaluationReport& report) {
  const std::string model(AlignerName(report.model));
  const auto pct = [](double v) { return Printf("%.1f", 100.0 * v); };
  out << "# evaluate model=" << model << " folds=" << report.folds << " seed=" << report.seed
      << " pairs=" << report.pairs.size() << '\n';
  out << "# ROUGE recall in percent\n";
  out << "pair\tfold\t" << model << "_R1\t" << model << "_R2\t" << kBaselineName << "_R1\t"
      << kBaselineName << "_R2\t" << model << "_words\t" << kBaselineName << "_words\n";
  for (const PairScore& s : report.pairs) {
    out << s.id << '\t' << s.fold << '\t' << pct(s.model_rouge1) << '\t' << pct(s.model_rouge2)
        << '\t' << pct(s.baseline_rouge1) << '\t' << pct(s.baseline_rouge2) << '\t'
        << s.model_words << '\t' << s.baseline_words << '\n';
  }
  out << "# fold means\n";
  for (const PairScore& s : report.fold_means) {
    out << s.id << '\t' << s.fold << '\t' << pct(s.model_rouge1) << '\t' << pct(s.model_rouge2)
        << '\t' << pct(s.baseline_rouge1) << '\t' << pct(s.baseline_rouge2) << '\n';
  }
  out << "# average of fold means\n";
  out << "system\tROUGE-1\tROUGE-2\n";
  out << model << '\t' << pct(report.overall.model_rouge1) << '\t'
      << pct(report.overall.model_rouge2) << '\n';
  out << kBaselineName << '\t' << pct(report.overall.baseline_rouge1) << '\t'
      << pct(report.overall.baseline_rouge2) << '\n';
}

int RunIngest(const RunConfig& config, std::ostream& log) {
  if (config.workers == 0) throw ConfigError("--workers must be positive");
  const LoadedCorpus corpus = LoadCorpus(config);
  LogLoadProblems(corpus, log);
  std::vector<double> ratios;
  std::string report = Printf("# ingest admitted=%zu rejected=%zu failed=%zu\n",
                              corpus.pairs.size(), corpus.rejected.size(), corpus.failed.size());
  report += "pair\tbook_words\tsummary_words\tratio\n";
  for (const LoadedPair& pair : corpus.pairs) {
    for (const TokenizedDocument* doc : {&pair.book, &pair.summary}) {
      std::ostringstream text;
      WriteTokens(text, *doc);
      const char* kind = doc == &pair.book ? "book" : "summary";
      WriteFile(config.out / "tokens" / (pair.id + "." + kind + ".tok"), text.str());
    }
    const double ratio = static_cast<double>(pair.summary.content_word_count) /
                         static_cast<double>(pair.book.content_word_count);
    ratios.push_back(ratio);
    report += Printf("%s\t%zu\t%zu\t%.6f\n", pair.id.c_str(), pair.book.content_word_count,
                     pair.summary.content_word_count, ratio);
  }
  for (const auto& [id, reason] : corpus.rejected) {
    report += "# rejected " + id + ": " + reason + '\n';
  }
  for (const auto& [id, error] : corpus.failed) {
    report += "# failed " + id + ": " + error + '\n';
  }
  if (!ratios.empty()) {
    const RatioStats stats = CorpusRatioStats(ratios);
    report += Printf("# ratio mean=%.6f q05=%.6f q95=%.6f\n", stats.mean, stats.quantile05,
                     stats.quantile95);
  }
  WriteFile(config.out / "reports" / "ingest.tsv", report);
  log << "ingested " << corpus.pairs.size() << " pairs into " << (config.out / "tokens").string()
      << '\n';
  return corpus.failed.empty() ? 0 : 1;
}

int RunAlign(const RunConfig& config, std::ostream& log) {
  ValidateRunConfig(config);
  const LoadedCorpus corpus = LoadCorpus(config);
  LogLoadProblems(corpus, log);
  const SynonymLexicon lexicon =
      config.thesaurus.empty() ? SynonymLexicon() : SynonymLexicon::Load(config.thesaurus);
  const fs::path dir = config.AlignmentDir();
  fs::create_directories(dir);

  const std::size_t n = corpus.pairs.size();
  std::vector<PairAlignment> results(n);
  std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(Threads(config.workers))
  for (std::size_t i = 0; i < n; ++i) {
    try {
      results[i] = AlignPair(corpus.pairs[i], config, lexicon);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }

  std::size_t failures = corpus.failed.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& id = corpus.pairs[i].id;
    log << results[i].log;
    const fs::path base = dir / id;
    if (!errors[i].empty()) {
      ++failures;
      log << "pair=" << id << " failed: " << errors[i] << '\n';
      // A stale file from an earlier run would otherwise be evaluated.
      for (const char* ext : {".align", ".samples", ".params"}) {
        fs::remove(fs::path(base).concat(ext));
      }
      continue;
    }
    std::ostringstream align;
    WriteAlignment(align, results[i].result);
    WriteFile(fs::path(base).concat(".align"), align.str());
    if (config.model == AlignerKind::kPassage) {
      std::ostringstream samples;
      WriteSampleLog(samples, results[i].samples, results[i].burn_in);
      WriteFile(fs::path(base).concat(".samples"), samples.str());
    }
    if (!results[i].parameters.empty()) {
      WriteFile(fs::path(base).concat(".params"), results[i].parameters);
    }
    log << Printf("pair=%s done loglik=%.6f\n", id.c_str(), results[i].result.log_likelihood);
  }
  log << "aligned " << n - (failures - corpus.failed.size()) << " of "
      << n + corpus.failed.size() << " pairs into " << dir.string() << '\n';
  return failures == 0 ? 0 : 1;
}

int RunEvaluate(const RunConfig& config, std::ostream& log) {
  return RunCrossValidation(config, log, false);
}

int RunSummarize(const RunConfig& config, std::ostream& log) {
  return RunCrossValidation(config, log, true);
}

int RunReport(const RunConfig& config, std::ostream& log) {
  const std::string model_name(AlignerName(config.model));
  int status = 0;

  std::vector<std::pair<std::size_t, fs::path>> model_files;
  const fs::path models_dir = config.out / "models" / model_name;
  if (fs::is_directory(models_dir)) {
    for (const auto& entry : fs::directory_iterator(models_dir)) {
      std::size_t fold = 0;
      const std::string name = entry.path().filename().string();
      if (std::sscanf(name.c_str(), "fold_%zu.model", &fold) == 1 &&
          entry.path().extension() == ".model") {
        model_files.emplace_back(fold, entry.path());
      }
    }
  }
  std::sort(model_files.begin(), model_files.end());
  if (model_files.empty()) {
    log << "no fold models under " << models_dir.string() << '\n';
  } else {
    std::vector<NamedWeights> folds;
    for (const auto& [fold, path] : model_files) {
      std::ifstream in(path);
      folds.push_back(ReadModel(in));
    }
    const std::vector<RankedFeature> ranked = RankFeatures(folds);
    std::string table = Printf("# strongest features predicting inclusion model=%s folds=%zu\n",
                               model_name.c_str(), folds.size());
    table += "rank\tfeature\tmean_rank\n";
    for (std::size_t r = 0; r < std::min(kTopFeatures, ranked.size()); ++r) {
      table += Printf("%zu\t%s\t%.2f\n", r + 1, ranked[r].name.c_str(), ranked[r].mean_rank);
    }
    const fs::path path = config.out / "reports" / ("features_" + model_name + ".tsv");
    WriteFile(path, table);
    log << "features=" << path.string() << '\n';
  }

  std::vector<fs::path> sample_files;
  const fs::path dir = config.AlignmentDir();
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".samples") sample_files.push_back(entry.path());
    }
  }
  std::sort(sample_files.begin(), sample_files.end());
  for (const fs::path& path : sample_files) {
    const std::string id = path.stem().string();
    try {
      std::ifstream in(path);
      std::size_t burn_in = 0;
      const BoundarySampleLog samples = ReadSampleLog(in, &burn_in);
      WriteFile(config.out / "reports" / "boundaries" / (id + ".tsv"),
                BoundaryHistogram(id, samples, burn_in));
    } catch (const std::exception& e) {
      log << "pair=" << id << " sample log unreadable: " << e.what() << '\n';
      status = 1;
    }
  }
  if (!sample_files.empty()) {
    log << "boundary histograms=" << (config.out / "reports" / "boundaries").string() << '\n';
  }
  return status;
}

int RunSynth(const SyntheticConfig& config, const fs::path& out, std::ostream& log) {
  const std::vector<SyntheticPair> pairs = GenerateSyntheticCorpus(config);
  WriteSyntheticCorpus(out, pairs);
  log << "wrote " << pairs.size() << " synthetic pairs to " << out.string() << '\n';
  return 0;
}

}  // namespace bookalign
