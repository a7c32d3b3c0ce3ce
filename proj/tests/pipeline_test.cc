// Copyright 2026 The Chrononer Authors.
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

#include "pipeline/pipeline.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "common/checkpoint.h"
#include "common/digest.h"
#include "common/error.h"
#include "json.hpp"

namespace chrononer {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("chrononer_pipeline_" + name);
  fs::remove_all(dir);
  return dir;
}

Config Tiny(const fs::path& out) {
  Config c;
  c.Set("run.out", out.string());
  c.Set("run.seeds", "1,2");
  c.Set("synth.past_paragraphs", "120");
  c.Set("synth.future_paragraphs", "40");
  c.Set("lm.d_emb", "4");
  c.Set("lm.d_h", "8");
  c.Set("lm.epochs", "1");
  c.Set("tagger.d_t", "6");
  c.Set("tagger.epochs", "3");
  return c;
}

std::string Slurp(const fs::path& p) { return ReadFileBytes(p); }

nlohmann::json Manifest(const fs::path& out) {
  return nlohmann::json::parse(Slurp(OutputLayout(out).Manifest()));
}

TEST(PipelineTest, EndToEndTinyRun) {
  const fs::path out = TempDir("e2e");
  const ExperimentConfig config = ResolveConfig(Tiny(out));
  const OutputLayout layout(out);
  EXPECT_NE(RunSynth(config).find("160"), std::string::npos);
  RunPrepare(config);
  RunStats(config);
  RunPretrain(config);
  const std::string train = RunTrain(config, "static", CorpusStyle::kMarked, 1);
  EXPECT_TRUE(fs::exists(layout.Predictions("static", CorpusStyle::kMarked, 1)));
  const std::string paths = RunPaths(config);
  // The tagger trained by the train stage is reused.
  EXPECT_NE(paths.find("trained 7 tagger(s)"), std::string::npos) << paths;
  RunHypotheses(config);
  RunReport(config);

  for (const fs::path& p :
       {layout.Synthetic(), layout.SynthLedgerFile(), layout.StatsMarkdown(), layout.StatsCsv(),
        layout.ForwardLm(), layout.BackwardLm(), layout.PretrainLog(), layout.Results(),
        layout.Boxplot(), layout.HypothesesMarkdownFile(), layout.HypothesesCsvFile(),
        layout.Report()}) {
    EXPECT_TRUE(fs::exists(p)) << p;
  }
  for (Period period : {Period::kPast, Period::kFuture}) {
    for (CorpusStyle style : {CorpusStyle::kMarked, CorpusStyle::kUnmarked}) {
      EXPECT_TRUE(fs::exists(layout.Variant(period, style)));
    }
  }
  const auto manifest = Manifest(out);
  EXPECT_EQ(manifest["config_digest"], config.digest);
  for (const char* stage : {"synth", "prepare", "stats", "pretrain", "train", "paths",
                            "hypotheses", "report"}) {
    EXPECT_TRUE(manifest["stages"].contains(stage)) << stage;
  }
  for (const auto& [rel, digest] : manifest["artifacts"].items()) {
    EXPECT_EQ(Sha256File(out / rel), digest.get<std::string>()) << rel;
  }
  EXPECT_TRUE(manifest["artifacts"].contains("results.csv"));
  EXPECT_FALSE(manifest["artifacts"].contains("lm/pretrain_log.csv"));

  // An interrupted run resumes: nothing is retrained and the results match.
  const std::string results = Slurp(layout.Results());
  fs::remove(layout.Results());
  const std::string again = RunPaths(config);
  EXPECT_NE(again.find("trained 0 tagger(s)"), std::string::npos) << again;
  EXPECT_EQ(Slurp(layout.Results()), results);
  fs::remove_all(out);
}

TEST(PipelineTest, PrepareIsDeterministic) {
  const fs::path a = TempDir("det_a"), b = TempDir("det_b");
  RunPrepare(ResolveConfig(Tiny(a)));
  RunPrepare(ResolveConfig(Tiny(b)));
  for (Period period : {Period::kPast, Period::kFuture}) {
    for (CorpusStyle style : {CorpusStyle::kMarked, CorpusStyle::kUnmarked}) {
      const std::string x = Slurp(OutputLayout(a).Variant(period, style));
      EXPECT_FALSE(x.empty());
      EXPECT_EQ(x, Slurp(OutputLayout(b).Variant(period, style)));
    }
  }
  EXPECT_EQ(Slurp(OutputLayout(a).StatsCsv()), Slurp(OutputLayout(b).StatsCsv()));
  EXPECT_EQ(Manifest(a)["artifacts"], Manifest(b)["artifacts"]);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(PipelineTest, PretrainWithZeroEpochsWritesInitialization) {
  const fs::path out = TempDir("zero");
  Config c = Tiny(out);
  c.Set("lm.epochs", "0");
  const ExperimentConfig config = ResolveConfig(c);
  RunPrepare(config);
  RunPretrain(config);
  const OutputLayout layout(out);
  EXPECT_TRUE(fs::exists(layout.ForwardLm()));
  std::istringstream log(Slurp(layout.PretrainLog()));
  int lines = 0;
  for (std::string line; std::getline(log, line);) ++lines;
  EXPECT_EQ(lines, 1);  // header only
  fs::remove_all(out);
}

TEST(PipelineTest, MissingInputsAreDataErrors) {
  const fs::path out = TempDir("missing");
  Config c = Tiny(out);
  c.Set("corpus.source", "file");
  c.Set("corpus.path", (out / "nowhere.jsonl").string());
  try {
    RunPrepare(ResolveConfig(c));
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("nowhere.jsonl"), std::string::npos);
  }
  const ExperimentConfig config = ResolveConfig(Tiny(out));
  EXPECT_THROW(RunPretrain(config), DataError);
  EXPECT_THROW(RunPaths(config), DataError);
  try {
    RunHypotheses(config);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("paths"), std::string::npos);
  }
  fs::remove_all(out);
}

TEST(PipelineTest, ReadsCorpusFiles) {
  const fs::path out = TempDir("file");
  fs::create_directories(out);
  std::ofstream(out / "in.jsonl")
      << R"({"id":"p1","reign":"injo","year":1630,"text":"王曰甲乙入京","entities":[[2,4,"PERSON"]],"markers":[]})"
      << "\n"
      << R"({"id":"f1","reign":"soonjong","year":1908,"text":"丙丁在京","entities":[[0,2,"PERSON"]],"markers":[]})"
      << "\n";
  Config c = Tiny(out);
  c.Set("corpus.source", "file");
  c.Set("corpus.path", (out / "in.jsonl").string());
  const std::string summary = RunPrepare(ResolveConfig(c));
  EXPECT_NE(summary.find("past paragraphs: 1"), std::string::npos) << summary;
  fs::remove_all(out);
}

}  // namespace
}  // namespace chrononer
