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

#ifndef CHRONONER_PIPELINE_PIPELINE_H_
#define CHRONONER_PIPELINE_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "corpus/types.h"
#include "evaluation/paths.h"
#include "pipeline/config.h"

namespace chrononer {

// Locations of the artifacts inside the output directory.
struct OutputLayout {
  explicit OutputLayout(std::filesystem::path root) : root(std::move(root)) {}

  std::filesystem::path root;
  std::filesystem::path Synthetic() const { return root / "corpus" / "synthetic.jsonl"; }
  std::filesystem::path SynthLedgerFile() const { return root / "corpus" / "synthetic_ledger.json"; }
  std::filesystem::path Variant(Period period, CorpusStyle style) const;
  std::filesystem::path StatsMarkdown() const { return root / "stats.md"; }
  std::filesystem::path StatsCsv() const { return root / "stats.csv"; }
  std::filesystem::path ForwardLm() const { return root / "lm" / "forward.cner"; }
  std::filesystem::path BackwardLm() const { return root / "lm" / "backward.cner"; }
  std::filesystem::path PretrainLog() const { return root / "lm" / "pretrain_log.csv"; }
  std::filesystem::path Taggers() const { return root / "taggers"; }
  std::filesystem::path Predictions(const std::string& model, CorpusStyle style,
                                    uint64_t seed) const;
  std::filesystem::path Results() const { return root / "results.csv"; }
  std::filesystem::path Boxplot() const { return root / "boxplot.csv"; }
  std::filesystem::path HypothesesMarkdownFile() const { return root / "hypotheses.md"; }
  std::filesystem::path HypothesesCsvFile() const { return root / "hypotheses.csv"; }
  std::filesystem::path Report() const { return root / "report.md"; }
  std::filesystem::path Manifest() const { return root / "manifest.json"; }
};

// Each stage validates its prerequisites before writing anything, records
// its wall-clock time in the manifest and returns a short text summary.

// Generates the synthetic corpus (standoff form) and the generator ledger.
std::string RunSynth(const ExperimentConfig& config);
// Loads or generates the corpus, splits it by period and writes the four
// variants plus the descriptive statistics.
std::string RunPrepare(const ExperimentConfig& config);
// Recomputes the descriptive statistics from the prepared variants.
std::string RunStats(const ExperimentConfig& config);
// Trains the forward and backward character language models on the past
// training paragraphs of both styles.
std::string RunPretrain(const ExperimentConfig& config);
// Trains (or reuses) one tagger and writes its predictions on the past test
// split of its own style.
std::string RunTrain(const ExperimentConfig& config, const std::string& model, CorpusStyle style,
                     uint64_t seed);
// Evaluates every transfer path for every model; writes results.csv and
// boxplot.csv. Previously trained checkpoints are reused.
std::string RunPaths(const ExperimentConfig& config);
std::string RunHypotheses(const ExperimentConfig& config);
std::string RunReport(const ExperimentConfig& config);

// Shared with tests: the four variants of an output directory.
CorpusSet LoadCorpusSet(const OutputLayout& layout);

}  // namespace chrononer

#endif  // CHRONONER_PIPELINE_PIPELINE_H_
