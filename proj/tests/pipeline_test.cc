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
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace bookalign {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> Ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("p" + std::to_string(i));
  return ids;
}

TEST(FoldPlanTest, PartitionsAndBalances) {
  const FoldPlan plan = MakeFoldPlan(Ids(23), 5, 7);
  std::set<std::string> seen;
  for (std::size_t f = 0; f < 5; ++f) {
    const auto members = plan.Members(f);
    EXPECT_TRUE(members.size() == 4 || members.size() == 5);
    EXPECT_TRUE(std::is_sorted(members.begin(), members.end()));
    for (const std::string& id : members) {
      EXPECT_TRUE(seen.insert(id).second) << id;
      EXPECT_EQ(plan.FoldOf(id), f);
    }
  }
  EXPECT_EQ(seen.size(), 23u);
}

TEST(FoldPlanTest, DependsOnSeedNotInputOrder) {
  std::vector<std::string> reversed = Ids(12);
  std::reverse(reversed.begin(), reversed.end());
  const FoldPlan a = MakeFoldPlan(Ids(12), 3, 1);
  const FoldPlan b = MakeFoldPlan(reversed, 3, 1);
  const FoldPlan c = MakeFoldPlan(Ids(12), 3, 2);
  EXPECT_EQ(a.Members(0), b.Members(0));
  EXPECT_NE(a.Members(0), c.Members(0));
}

TEST(FoldPlanTest, BadFoldCounts) {
  EXPECT_THROW(MakeFoldPlan(Ids(5), 1, 1), ConfigError);
  EXPECT_THROW(MakeFoldPlan(Ids(5), 6, 1), ConfigError);
}

TEST(RunConfigTest, Validation) {
  RunConfig ok;
  EXPECT_NO_THROW(ValidateRunConfig(ok));
  auto expect_bad = [](auto mutate) {
    RunConfig c;
    mutate(c);
    EXPECT_THROW(ValidateRunConfig(c), ConfigError);
  };
  expect_bad([](RunConfig& c) { c.k = 0; });
  expect_bad([](RunConfig& c) { c.iterations = 0; });
  expect_bad([](RunConfig& c) { c.alpha = -0.5; });
  expect_bad([](RunConfig& c) { c.folds = 1; });
  expect_bad([](RunConfig& c) { c.workers = 0; });
  expect_bad([](RunConfig& c) { c.bins = "0,3"; });
  expect_bad([](RunConfig& c) { c.lambda = -1.0; });
  RunConfig c;
  c.out = "o";
  EXPECT_EQ(c.AlignmentDir(), fs::path("o") / "alignments" / "passage");
}

// A small planted corpus run through every command once.
class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / "bookalign_pipeline_test";
    fs::remove_all(root_);
    SyntheticConfig synth;
    synth.num_pairs = 6;
    synth.num_passages = 3;
    synth.lead_filler_words = 300;
    synth.seed = 5;
    std::ostringstream log;
    ASSERT_EQ(RunSynth(synth, root_ / "corpus", log), 0);
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static RunConfig Config(const std::string& out, AlignerKind model = AlignerKind::kPassage) {
    RunConfig c;
    c.manifest = root_ / "corpus" / "manifest.tsv";
    c.out = root_ / out;
    c.model = model;
    c.k = 4;
    c.iterations = 15;
    c.folds = 3;
    c.thresholds = {100, 10};
    return c;
  }

  static fs::path root_;
};

fs::path PipelineTest::root_;

TEST_F(PipelineTest, IngestWritesTokensAndStats) {
  const RunConfig c = Config("ingest");
  std::ostringstream log;
  ASSERT_EQ(RunIngest(c, log), 0);
  const LoadedCorpus corpus = LoadCorpus(c);
  ASSERT_EQ(corpus.pairs.size(), 6u);
  for (const LoadedPair& p : corpus.pairs) {
    EXPECT_TRUE(fs::exists(c.out / "tokens" / (p.id + ".book.tok")));
  }
  EXPECT_NE(Slurp(c.out / "reports" / "ingest.tsv").find("mean"), std::string::npos);
}

TEST_F(PipelineTest, RejectedPairsAreReported) {
  RunConfig c = Config("rejected");
  c.thresholds = {1000000, 10};
  const LoadedCorpus corpus = LoadCorpus(c);
  EXPECT_TRUE(corpus.pairs.empty());
  EXPECT_EQ(corpus.rejected.size(), 6u);
}

TEST_F(PipelineTest, EvaluateIsDeterministicAcrossRunsAndWorkers) {
  RunConfig c = Config("determinism");
  std::ostringstream log;
  ASSERT_EQ(RunAlign(c, log), 0) << log.str();
  ASSERT_EQ(RunEvaluate(c, log), 0) << log.str();
  const fs::path report = c.out / "reports" / "evaluate_passage.tsv";
  const std::string first = Slurp(report);
  ASSERT_FALSE(first.empty());
  ASSERT_EQ(RunEvaluate(c, log), 0);
  EXPECT_EQ(Slurp(report), first);
  c.workers = 3;
  ASSERT_EQ(RunEvaluate(c, log), 0);
  EXPECT_EQ(Slurp(report), first);
  EXPECT_NE(first.find("# average of fold means"), std::string::npos);
  for (std::size_t f = 0; f < 3; ++f) {
    EXPECT_TRUE(fs::exists(c.out / "models" / "passage" /
                           ("fold_" + std::to_string(f) + ".model")));
  }
}

TEST_F(PipelineTest, CrossValidationKeepsTestPairsOut) {
  const RunConfig c = Config("folds");
  const LoadedCorpus corpus = LoadCorpus(c);
  std::vector<AlignmentResult> alignments;
  for (const LoadedPair& p : corpus.pairs) alignments.push_back(AlignPair(p, c, {}).result);
  FoldOutputs outputs;
  const EvaluationReport report = CrossValidate(corpus, alignments, c, &outputs);
  ASSERT_EQ(report.pairs.size(), 6u);
  ASSERT_EQ(outputs.models.size(), 3u);
  std::vector<std::string> ids;
  for (const LoadedPair& p : corpus.pairs) ids.push_back(p.id);
  const FoldPlan plan = MakeFoldPlan(ids, 3, c.seed);
  for (const PairScore& s : report.pairs) {
    EXPECT_EQ(s.fold, plan.FoldOf(s.id));
    EXPECT_LE(s.model_words, c.word_budget);
    EXPECT_LE(s.baseline_words, c.word_budget);
    EXPECT_GE(s.model_rouge1, 0.0);
    EXPECT_LE(s.model_rouge1, 1.0);
  }
  // The overall score is the mean of fold means.
  double sum = 0.0;
  for (const PairScore& f : report.fold_means) sum += f.model_rouge1;
  EXPECT_NEAR(report.overall.model_rouge1, sum / 3.0, 1e-15);
  RunConfig too_many = c;
  too_many.folds = 7;
  EXPECT_THROW(CrossValidate(corpus, alignments, too_many), ConfigError);
}

TEST_F(PipelineTest, JingWritesNoParameters) {
  const RunConfig c = Config("jing", AlignerKind::kJing);
  std::ostringstream log;
  ASSERT_EQ(RunAlign(c, log), 0) << log.str();
  std::size_t aligns = 0;
  for (const auto& entry : fs::directory_iterator(c.AlignmentDir())) {
    EXPECT_NE(entry.path().extension(), ".params");
    EXPECT_NE(entry.path().extension(), ".samples");
    aligns += entry.path().extension() == ".align" ? 1 : 0;
  }
  EXPECT_EQ(aligns, 6u);
}

TEST_F(PipelineTest, MissingAlignmentsAreNamed) {
  const RunConfig c = Config("missing");
  const std::string first_id = LoadCorpus(c).pairs.at(0).id;
  std::ostringstream log;
  EXPECT_THROW(
      {
        try {
          RunEvaluate(c, log);
        } catch (const InputError& e) {
          EXPECT_NE(std::string(e.what()).find("missing alignments"), std::string::npos);
          EXPECT_NE(std::string(e.what()).find(first_id), std::string::npos) << e.what();
          throw;
        }
      },
      InputError);
}

TEST_F(PipelineTest, BoundaryHistogramsCountPostBurnInSamples) {
  const RunConfig c = Config("report");
  std::ostringstream log;
  ASSERT_EQ(RunAlign(c, log), 0);
  ASSERT_EQ(RunEvaluate(c, log), 0);
  // A sample log with a header and no draws still yields a histogram file.
  std::ofstream(c.AlignmentDir() / "empty_pair.samples")
      << "# states=4 iterations=0 burn_in=0\n";
  ASSERT_EQ(RunReport(c, log), 0) << log.str();
  const std::string features = Slurp(c.out / "reports" / "features_passage.tsv");
  EXPECT_NE(features.find("rank\tfeature\tmean_rank"), std::string::npos);
  const std::string empty = Slurp(c.out / "reports" / "boundaries" / "empty_pair.tsv");
  EXPECT_NE(empty.find("state\tside\tposition\tcount"), std::string::npos);
  EXPECT_EQ(std::count(empty.begin(), empty.end(), '\n'), 2);

  const LoadedCorpus corpus = LoadCorpus(c);
  const std::string id = corpus.pairs[0].id;
  std::istringstream hist(Slurp(c.out / "reports" / "boundaries" / (id + ".tsv")));
  std::string line;
  std::vector<std::size_t> per_state_side(8, 0);
  while (std::getline(hist, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("state", 0) == 0) continue;
    std::istringstream row(line);
    std::size_t state = 0, position = 0, count = 0;
    std::string side;
    row >> state >> side >> position >> count;
    per_state_side[2 * state + (side == "left" ? 0 : 1)] += count;
  }
  // 15 iterations with 20% burn-in leave 12 draws per boundary.
  for (std::size_t total : per_state_side) EXPECT_EQ(total, 12u);
}

TEST_F(PipelineTest, TokenModelWritesParameters) {
  RunConfig c = Config("token", AlignerKind::kToken);
  c.iterations = 5;
  std::ostringstream log;
  ASSERT_EQ(RunAlign(c, log), 0) << log.str();
  const LoadedCorpus corpus = LoadCorpus(c);
  const std::string params = Slurp(c.AlignmentDir() / (corpus.pairs[0].id + ".params"));
  EXPECT_NE(params.find("jump\tnull"), std::string::npos);
  EXPECT_NE(params.find("null_emission"), std::string::npos);
}

TEST_F(PipelineTest, OversizedStateCountFailsThePairOnly) {
  RunConfig c = Config("oversized");
  c.k = 100000;
  std::ostringstream log;
  EXPECT_EQ(RunAlign(c, log), 1);
}

}  // namespace
}  // namespace bookalign
