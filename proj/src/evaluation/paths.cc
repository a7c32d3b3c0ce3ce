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

#include "evaluation/paths.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <set>
#include <thread>

#include "common/checkpoint.h"
#include "common/digest.h"
#include "common/error.h"
#include "corpus/bio.h"
#include "corpus/corpus.h"

namespace chrononer {
namespace {

constexpr std::array<CorpusStyle, 2> kStyles = {CorpusStyle::kMarked, CorpusStyle::kUnmarked};

std::vector<TaggedSequence> SequencesOf(const std::vector<AnnotatedParagraph>& paragraphs,
                                        Split split) {
  std::vector<TaggedSequence> out;
  for (const auto& p : paragraphs) {
    if (p.split == split && !p.text.empty()) out.push_back(ToBio(p));
  }
  return out;
}

void WriteAtomically(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  WriteFileBytes(tmp, bytes);
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::string_view PeriodName(Period period) {
  return period == Period::kPast ? "past" : "future";
}

const std::array<TransferPath, 6>& TransferPaths() {
  using enum CorpusStyle;
  static const std::array<TransferPath, 6> kPaths = {{
      {'A', Period::kPast, kMarked, Period::kPast, kUnmarked},
      {'B', Period::kPast, kMarked, Period::kFuture, kMarked},
      {'C', Period::kPast, kMarked, Period::kFuture, kUnmarked},
      {'D', Period::kPast, kUnmarked, Period::kPast, kUnmarked},
      {'E', Period::kPast, kUnmarked, Period::kFuture, kUnmarked},
      {'F', Period::kPast, kUnmarked, Period::kPast, kMarked},
  }};
  return kPaths;
}

const TransferPath& PathByName(char name) {
  for (const auto& p : TransferPaths()) {
    if (p.name == name) return p;
  }
  throw ConfigError(std::string("unknown transfer path '") + name + "'");
}

void CorpusSet::Set(Period period, CorpusStyle style, std::vector<AnnotatedParagraph> paragraphs) {
  variants_[Index(period, style)] = std::move(paragraphs);
  present_[Index(period, style)] = true;
}

bool CorpusSet::Has(Period period, CorpusStyle style) const {
  return present_[Index(period, style)];
}

const std::vector<AnnotatedParagraph>& CorpusSet::Get(Period period, CorpusStyle style) const {
  if (!Has(period, style)) {
    throw DataError("corpus variant " + std::string(PeriodName(period)) + "/" +
                    std::string(StyleName(style)) + " has not been prepared");
  }
  return variants_[Index(period, style)];
}

TrainCache::TrainCache(const CorpusSet* corpora, ModelFactory factory, TaggerHyperparams hp,
                       std::filesystem::path dir)
    : corpora_(corpora), factory_(std::move(factory)), hp_(std::move(hp)), dir_(std::move(dir)) {}

ProviderPtr TrainCache::Provider(const std::string& model) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = providers_.find(model);
  if (it != providers_.end()) return it->second;
  ProviderPtr p = factory_(model);
  if (!p) throw ConfigError("no embedding provider for model '" + model + "'");
  providers_.emplace(model, p);
  return p;
}

std::string TrainCache::ConditionKey(const std::string& model, CorpusStyle style, uint64_t seed) {
  const ProviderPtr provider = Provider(model);
  PayloadWriter w;
  w.String("chrononer-tagger-condition-v1");
  w.String(model);
  w.String(StyleName(style));
  w.U64(seed);
  w.U32(static_cast<uint32_t>(hp_.d_t));
  w.F64(hp_.lr);
  w.U32(static_cast<uint32_t>(hp_.epochs));
  w.U32(static_cast<uint32_t>(hp_.batch));
  w.F64(hp_.clip);
  w.U32(static_cast<uint32_t>(hp_.max_len));
  w.U32(static_cast<uint32_t>(hp_.overlap));
  w.String(hp_.optimizer);
  w.F64(hp_.init_scale);
  w.String(Sha256Hex(EncodeCheckpoint(provider->Sections())));
  std::string data;
  for (const auto& p : corpora_->Get(Period::kPast, style)) {
    if (p.split == Split::kTrain || p.split == Split::kDev) {
      data += SerializeParagraph(p);
      data += '\n';
    }
  }
  w.String(Sha256Hex(data));
  return Sha256Hex(w.bytes());
}

std::filesystem::path TrainCache::CheckpointPath(const std::string& model, CorpusStyle style,
                                                 uint64_t seed) {
  const std::string key = ConditionKey(model, style, seed);
  return dir_ / (model + "-" + std::string(StyleName(style)) + "-seed" + std::to_string(seed) +
                 "-" + key.substr(0, 16) + ".cner");
}

int TrainCache::trained_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return trained_;
}

TrainedModel TrainCache::Get(const std::string& model, CorpusStyle style, uint64_t seed) {
  const std::string id = model + "\x1f" + std::string(StyleName(style)) + "\x1f" +
                         std::to_string(seed);
  std::promise<TrainedModel> promise;
  std::shared_future<TrainedModel> future;
  bool owner = false;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(id);
    if (it == entries_.end()) {
      future = promise.get_future().share();
      entries_.emplace(id, future);
      owner = true;
    } else {
      future = it->second;
    }
  }
  if (owner) {
    try {
      promise.set_value(Train(model, style, seed));
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
  }
  return future.get();
}

TrainedModel TrainCache::Train(const std::string& model, CorpusStyle style, uint64_t seed) {
  std::filesystem::path path;
  if (!dir_.empty()) {
    path = CheckpointPath(model, style, seed);
    if (std::filesystem::exists(path)) {
      const std::string bytes = ReadFileBytes(path);
      TrainedModel out;
      out.tagger = std::make_shared<const CrfTagger>(CrfTagger::Decode(bytes));
      out.digest = Sha256Hex(bytes);
      out.loaded_from_disk = true;
      return out;
    }
  }
  const auto& variant = corpora_->Get(Period::kPast, style);
  const auto train = SequencesOf(variant, Split::kTrain);
  const auto dev = SequencesOf(variant, Split::kDev);
  if (train.empty()) {
    throw DataError("past/" + std::string(StyleName(style)) + " corpus has no training paragraphs");
  }
  TrainedTagger trained = TrainTagger(train, dev, Provider(model), hp_, seed);
  const std::string bytes = trained.model.Encode();
  if (!path.empty()) WriteAtomically(path, bytes);
  TrainedModel out;
  // Decoding the bytes makes a fresh model and a resumed one identical.
  out.tagger = std::make_shared<const CrfTagger>(CrfTagger::Decode(bytes));
  out.digest = Sha256Hex(bytes);
  {
    std::lock_guard<std::mutex> lock(mu_);
    ++trained_;
  }
  return out;
}

EvalResult EvaluateOnTest(const CrfTagger& tagger, const std::vector<AnnotatedParagraph>& eval) {
  std::vector<std::vector<EntitySpan>> gold, predicted;
  int64_t chars = 0, correct = 0;
  for (const auto& p : eval) {
    if (p.split != Split::kTest) continue;
    auto spans = Predict(tagger, p);
    const int n = static_cast<int>(p.text.size());
    const auto gold_tags = TagsFromSpans(p.entities, n);
    const auto pred_tags = TagsFromSpans(spans, n);
    for (int i = 0; i < n; ++i) correct += gold_tags[i] == pred_tags[i];
    chars += n;
    gold.push_back(p.entities);
    predicted.push_back(std::move(spans));
  }
  if (gold.empty()) throw DataError("evaluation corpus has no test paragraphs");
  EvalResult r = ScoreSpans(gold, predicted);
  if (chars > 0) r.accuracy = static_cast<double>(correct) / static_cast<double>(chars);
  return r;
}

std::vector<EvalResult> RunPath(const TransferPath& path, const std::string& model,
                                const std::vector<uint64_t>& seeds, TrainCache& cache,
                                const CorpusSet& corpora) {
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  const auto& eval = corpora.Get(path.eval_time, path.eval_style);
  std::vector<EvalResult> out;
  for (uint64_t seed : seeds) {
    const TrainedModel m = cache.Get(model, path.train_style, seed);
    EvalResult r = EvaluateOnTest(*m.tagger, eval);
    r.model_digest = m.digest;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::string> PathMatrix::Models() const {
  std::vector<std::string> out;
  for (const auto& [key, results] : cells) {
    if (out.empty() || out.back() != key.first) out.push_back(key.first);
  }
  return out;
}

bool PathMatrix::Has(const std::string& model, char path) const {
  auto it = cells.find({model, path});
  return it != cells.end() && !it->second.empty();
}

PathMatrix RunAllPaths(const std::vector<std::string>& models, const std::vector<uint64_t>& seeds,
                       TrainCache& cache, const CorpusSet& corpora, int jobs) {
  if (models.empty()) throw ConfigError("the model list is empty");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (std::set<uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("seeds must be distinct");
  }
  // Fail before any training if a corpus variant is missing.
  for (const auto& path : TransferPaths()) corpora.Get(path.eval_time, path.eval_style);

  struct Job {
    std::string model;
    CorpusStyle style;
    uint64_t seed;
    std::vector<std::pair<char, EvalResult>> results;
    std::exception_ptr error;
  };
  std::vector<Job> work;
  for (const auto& model : models) {
    for (CorpusStyle style : kStyles) {
      for (uint64_t seed : seeds) work.push_back({model, style, seed, {}, nullptr});
    }
  }
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&]() {
    for (size_t i = next++; i < work.size() && !failed; i = next++) {
      Job& job = work[i];
      try {
        const TrainedModel m = cache.Get(job.model, job.style, job.seed);
        for (const auto& path : TransferPaths()) {
          if (path.train_style != job.style) continue;
          EvalResult r = EvaluateOnTest(*m.tagger, corpora.Get(path.eval_time, path.eval_style));
          r.model_digest = m.digest;
          job.results.emplace_back(path.name, std::move(r));
        }
      } catch (...) {
        job.error = std::current_exception();
        failed = true;
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(work.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  PathMatrix matrix;
  for (auto& job : work) {
    if (job.error) std::rethrow_exception(job.error);
    for (auto& [name, r] : job.results) matrix.cells[{job.model, name}][job.seed] = std::move(r);
  }
  return matrix;
}

std::vector<double> QualitySamples(const PathMatrix& matrix, const std::string& model, char path) {
  auto it = matrix.cells.find({model, path});
  if (it == matrix.cells.end() || it->second.empty()) {
    throw DataError("no results for model '" + model + "' on path " + std::string(1, path));
  }
  std::vector<double> out;
  for (const auto& [seed, r] : it->second) {
    for (const auto& c : r.per_type) {
      if (c.tp + c.fn == 0 && c.tp + c.fp == 0) continue;
      out.push_back(c.precision());
      out.push_back(c.recall());
      out.push_back(c.f1());
    }
  }
  return out;
}

}  // namespace chrononer
