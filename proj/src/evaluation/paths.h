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

#ifndef CHRONONER_EVALUATION_PATHS_H_
#define CHRONONER_EVALUATION_PATHS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corpus/types.h"
#include "evaluation/scoring.h"
#include "tagger/tagger.h"

namespace chrononer {

enum class Period : uint8_t { kPast = 0, kFuture = 1 };

std::string_view PeriodName(Period period);

// Training always uses the past period; only the style varies.
struct TransferPath {
  char name = 'A';
  Period train_time = Period::kPast;
  CorpusStyle train_style = CorpusStyle::kMarked;
  Period eval_time = Period::kPast;
  CorpusStyle eval_style = CorpusStyle::kUnmarked;
};

// A..F in order.
const std::array<TransferPath, 6>& TransferPaths();
// Throws ConfigError for an unknown name.
const TransferPath& PathByName(char name);

// The four prepared variants. Paragraphs carry their train/dev/test tags.
class CorpusSet {
 public:
  void Set(Period period, CorpusStyle style, std::vector<AnnotatedParagraph> paragraphs);
  bool Has(Period period, CorpusStyle style) const;
  // Throws DataError naming the missing variant.
  const std::vector<AnnotatedParagraph>& Get(Period period, CorpusStyle style) const;

 private:
  static int Index(Period period, CorpusStyle style) {
    return static_cast<int>(period) * 2 + static_cast<int>(style);
  }
  std::array<std::vector<AnnotatedParagraph>, 4> variants_;
  std::array<bool, 4> present_ = {false, false, false, false};
};

// Builds the embedding provider for a model name; throws ConfigError for
// names it does not know.
using ModelFactory = std::function<ProviderPtr(const std::string& model)>;

// A trained tagger together with the digest of its checkpoint bytes.
struct TrainedModel {
  std::shared_ptr<const CrfTagger> tagger;
  std::string digest;
  bool loaded_from_disk = false;
};

// Trains each (model, style, seed) condition at most once. Checkpoints are
// content-addressed by a key derived from everything that determines the
// trained weights; with a directory set they are written there and reused
// by later runs. Safe to use from several threads.
class TrainCache {
 public:
  TrainCache(const CorpusSet* corpora, ModelFactory factory, TaggerHyperparams hp,
             std::filesystem::path dir = {});

  TrainedModel Get(const std::string& model, CorpusStyle style, uint64_t seed);

  // Content key of a condition; stable across processes.
  std::string ConditionKey(const std::string& model, CorpusStyle style, uint64_t seed);
  std::filesystem::path CheckpointPath(const std::string& model, CorpusStyle style,
                                       uint64_t seed);
  // Number of models actually trained (not loaded) by this cache.
  int trained_count() const;

 private:
  ProviderPtr Provider(const std::string& model);
  TrainedModel Train(const std::string& model, CorpusStyle style, uint64_t seed);

  const CorpusSet* corpora_;
  ModelFactory factory_;
  TaggerHyperparams hp_;
  std::filesystem::path dir_;
  mutable std::mutex mu_;
  std::map<std::string, ProviderPtr> providers_;
  std::map<std::string, std::shared_future<TrainedModel>> entries_;
  int trained_ = 0;
};

// Scores a trained tagger on the test split of the evaluation variant.
EvalResult EvaluateOnTest(const CrfTagger& tagger, const std::vector<AnnotatedParagraph>& eval);

// One EvalResult per seed, in seed order.
std::vector<EvalResult> RunPath(const TransferPath& path, const std::string& model,
                                const std::vector<uint64_t>& seeds, TrainCache& cache,
                                const CorpusSet& corpora);

// (model, path) -> seed -> result.
struct PathMatrix {
  std::map<std::pair<std::string, char>, std::map<uint64_t, EvalResult>> cells;

  std::vector<std::string> Models() const;
  bool Has(const std::string& model, char path) const;
  bool operator==(const PathMatrix&) const = default;
};

// Runs every path for every model. Train conditions are scheduled on up to
// `jobs` threads; the merged matrix does not depend on completion order.
PathMatrix RunAllPaths(const std::vector<std::string>& models, const std::vector<uint64_t>& seeds,
                       TrainCache& cache, const CorpusSet& corpora, int jobs);

// Pooled per-type precision, recall and F1 over seeds for one cell. A type
// with neither gold nor predicted spans in a run contributes nothing.
std::vector<double> QualitySamples(const PathMatrix& matrix, const std::string& model, char path);

}  // namespace chrononer

#endif  // CHRONONER_EVALUATION_PATHS_H_
