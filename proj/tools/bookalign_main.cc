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

// bookalign: align books with their summaries and train extractive
// summarizers on the alignments.
//
//   bookalign synth --out corpus --pairs 20
//   bookalign ingest --manifest corpus/manifest.tsv --out run
//   bookalign align --manifest corpus/manifest.tsv --model passage --out run
//   bookalign evaluate --manifest corpus/manifest.tsv --model passage --out run
//   bookalign report --model passage --out run
//
// Exit status: 0 on success, 1 when a pair failed or input was unusable,
// 2 on a configuration error.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "bookalign/common.h"
#include "bookalign/pipeline.h"

namespace {

using bookalign::RunConfig;

struct Flags {
  RunConfig run;
  std::string model = "passage";
  std::string decode = "modal";
  std::string optimizer = "lbfgs";
};

void AddManifest(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--manifest", flags.run.manifest,
                  "TSV of pair id, book path, summary path")
      ->required();
  cmd->add_option("--min-book-words", flags.run.thresholds.min_book_words,
                  "Admission threshold on book content words")
      ->capture_default_str();
  cmd->add_option("--min-summary-words", flags.run.thresholds.min_summary_words,
                  "Admission threshold on summary content words")
      ->capture_default_str();
}

void AddCommon(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--out", flags.run.out, "Output directory")->capture_default_str();
  cmd->add_option("--workers", flags.run.workers, "Pairs or folds processed concurrently")
      ->capture_default_str();
  cmd->add_option("--seed", flags.run.seed, "Random seed")->capture_default_str();
}

void AddModel(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--model", flags.model, "Aligner: passage, token or jing")
      ->check(CLI::IsMember({"passage", "token", "jing"}))
      ->capture_default_str();
  cmd->add_option("--align-dir", flags.run.align_dir,
                  "Alignment directory (default <out>/alignments/<model>)");
}

void AddAlignOptions(CLI::App* cmd, Flags& flags) {
  RunConfig& run = flags.run;
  cmd->add_option("--k", run.k, "Passage states")->capture_default_str();
  cmd->add_option("--iters", run.iterations, "EM iterations")->capture_default_str();
  cmd->add_option("--alpha", run.alpha, "Passage emission smoothing")->capture_default_str();
  cmd->add_option("--tau", run.tau, "Largest token jump")->capture_default_str();
  cmd->add_option("--bins", run.bins, "Token jump bin edges")->capture_default_str();
  cmd->add_option("--null-bins", run.null_bins, "Token null regions; 0 disables nulls")
      ->capture_default_str();
  cmd->add_option("--tolerance", run.token_tolerance,
                  "Token EM stops below this log-likelihood gain")
      ->capture_default_str();
  cmd->add_option("--thesaurus", run.thesaurus, "Synonym file, 'head: syn, syn' per line");
  cmd->add_option("--decode", flags.decode, "Passage boundaries: modal or last")
      ->check(CLI::IsMember({"modal", "last"}))
      ->capture_default_str();
}

void AddTrainOptions(CLI::App* cmd, Flags& flags) {
  RunConfig& run = flags.run;
  cmd->add_option("--lambda", run.lambda, "L2 penalty")->capture_default_str();
  cmd->add_option("--folds", run.folds, "Cross-validation folds")->capture_default_str();
  cmd->add_option("--budget", run.word_budget, "Summary word budget")->capture_default_str();
  cmd->add_option("--alpha", run.alpha, "Smoothing used when labelling passages")
      ->capture_default_str();
  cmd->add_option("--optimizer", flags.optimizer, "lbfgs or gd")
      ->check(CLI::IsMember({"lbfgs", "gd"}))
      ->capture_default_str();
  cmd->add_flag("--export-features", run.export_features,
                "Write training matrices as sparse triplets");
}

void Finish(Flags& flags) {
  flags.run.model = bookalign::ParseAlignerKind(flags.model);
  flags.run.decode = flags.decode == "last" ? bookalign::DecodeBoundaries::kLastIteration
                                            : bookalign::DecodeBoundaries::kModal;
  flags.run.optimizer = flags.optimizer == "gd" ? bookalign::Optimizer::kGradientDescent
                                                : bookalign::Optimizer::kLbfgs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Align books with their summaries and train extractive summarizers"};
  app.require_subcommand(1);
  Flags flags;

  CLI::App* ingest = app.add_subcommand("ingest", "Tokenize and filter the corpus");
  AddManifest(ingest, flags);
  AddCommon(ingest, flags);

  CLI::App* align = app.add_subcommand("align", "Align every pair with one model");
  AddManifest(align, flags);
  AddCommon(align, flags);
  AddModel(align, flags);
  AddAlignOptions(align, flags);

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Cross-validate the extractor and score it with ROUGE");
  CLI::App* summarize =
      app.add_subcommand("summarize", "Cross-validate and write held-out summaries");
  for (CLI::App* cmd : {evaluate, summarize}) {
    AddManifest(cmd, flags);
    AddCommon(cmd, flags);
    AddModel(cmd, flags);
    AddTrainOptions(cmd, flags);
  }

  CLI::App* report = app.add_subcommand("report", "Top features and boundary histograms");
  AddCommon(report, flags);
  AddModel(report, flags);

  bookalign::SyntheticConfig synth_config;
  std::string synth_out = "synthetic";
  CLI::App* synth = app.add_subcommand("synth", "Generate a planted synthetic corpus");
  synth->add_option("--out", synth_out, "Corpus directory")->capture_default_str();
  synth->add_option("--pairs", synth_config.num_pairs)->capture_default_str();
  synth->add_option("--passages", synth_config.num_passages, "Planted blocks per book")
      ->capture_default_str();
  synth->add_option("--vocab", synth_config.vocab_per_passage, "Words per block vocabulary")
      ->capture_default_str();
  synth->add_option("--block-words", synth_config.block_words)->capture_default_str();
  synth->add_option("--sentences", synth_config.summary_sentences_per_passage,
                    "Summary sentences per block")
      ->capture_default_str();
  synth->add_option("--sentence-words", synth_config.summary_sentence_words)
      ->capture_default_str();
  synth->add_option("--lead", synth_config.lead_filler_words, "Filler words before block 0")
      ->capture_default_str();
  synth->add_option("--gap", synth_config.gap_filler_words)->capture_default_str();
  synth->add_option("--trail", synth_config.trail_filler_words)->capture_default_str();
  synth->add_option("--overlap", synth_config.overlap,
                    "Fraction of a block vocabulary shared with the previous block")
      ->capture_default_str();
  synth->add_option("--seed", synth_config.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    Finish(flags);
    if (*ingest) return bookalign::RunIngest(flags.run, std::cerr);
    if (*align) return bookalign::RunAlign(flags.run, std::cerr);
    if (*evaluate) return bookalign::RunEvaluate(flags.run, std::cerr);
    if (*summarize) return bookalign::RunSummarize(flags.run, std::cerr);
    if (*report) return bookalign::RunReport(flags.run, std::cerr);
    return bookalign::RunSynth(synth_config, synth_out, std::cerr);
  } catch (const bookalign::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
