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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "common/checkpoint.h"
#include "common/digest.h"
#include "common/error.h"
#include "common/random.h"
#include "common/utf8.h"
#include "corpus/corpus.h"
#include "corpus/synthetic.h"
#include "embeddings/char_lm.h"
#include "embeddings/provider.h"
#include "evaluation/results_csv.h"
#include "stats/hypotheses.h"
#include "stats/welch.h"

#ifndef CHRONONER_VERSION
#define CHRONONER_VERSION "0.0.0"
#endif

namespace chrononer {
namespace {

using Clock = std::chrono::steady_clock;
using Json = nlohmann::ordered_json;

constexpr std::array<Period, 2> kPeriods = {Period::kPast, Period::kFuture};
constexpr std::array<CorpusStyle, 2> kStyles = {CorpusStyle::kMarked, CorpusStyle::kUnmarked};

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  WriteFileBytes(tmp, text);
  std::filesystem::rename(tmp, path);
}

std::string ReadText(const std::filesystem::path& path) { return ReadFileBytes(path); }

void Require(const std::filesystem::path& path, std::string_view stage) {
  if (!std::filesystem::exists(path)) {
    throw DataError("missing prerequisite " + path.string() + " (run '" + std::string(stage) +
                    "' first)");
  }
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// Files whose content depends on timing are left out of the digests.
bool IsDeterministicArtifact(const std::filesystem::path& rel) {
  const std::string name = rel.filename().string();
  if (name == "manifest.json") return false;
  if (name.size() >= 4 && name.compare(name.size() - 4, 4, ".tmp") == 0) return false;
  if (name.size() >= 8 && name.compare(name.size() - 8, 8, "_log.csv") == 0) return false;
  return true;
}

void UpdateManifest(const ExperimentConfig& config, const std::string& stage, double seconds) {
  const OutputLayout layout(config.out);
  Json stages = Json::object();
  if (std::filesystem::exists(layout.Manifest())) {
    try {
      Json old = Json::parse(ReadText(layout.Manifest()));
      if (old.contains("config_digest") && old["config_digest"] == config.digest &&
          old.contains("stages")) {
        stages = old["stages"];
      }
    } catch (const Json::exception&) {
      // A damaged manifest is rebuilt from scratch.
    }
  }
  stages[stage] = {{"wall_seconds", seconds}};
  std::map<std::string, std::string> artifacts;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(config.out)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), config.out);
    if (!IsDeterministicArtifact(rel)) continue;
    artifacts[rel.generic_string()] = Sha256File(entry.path());
  }
  Json m;
  m["tool"] = "chrononer";
  m["version"] = CHRONONER_VERSION;
  m["config_digest"] = config.digest;
  Json settings = Json::object();
  std::istringstream lines(config.canonical);
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find('=');
    settings[line.substr(0, eq)] = line.substr(eq + 1);
  }
  m["config"] = settings;
  m["artifacts"] = artifacts;
  m["stages"] = stages;
  WriteText(layout.Manifest(), m.dump(2) + "\n");
}

template <typename Fn>
std::string TimedStage(const ExperimentConfig& config, const std::string& stage, Fn&& fn) {
  const auto start = Clock::now();
  std::string summary = fn();
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  UpdateManifest(config, stage, secs);
  return summary;
}

std::vector<AnnotatedParagraph> LoadSource(const ExperimentConfig& config, SynthLedger* ledger) {
  if (config.corpus_source == "file") {
    if (!std::filesystem::exists(config.corpus_path)) {
      throw DataError("corpus file not found: " + config.corpus_path.string());
    }
    auto corpus = ParseCorpusFile(config.corpus_path);
    // Inline glyphs, if any, become standoff markers.
    for (auto& p : corpus) p = ToStandoff(p);
    return corpus;
  }
  return GenerateSynthetic(config.synth, config.seed, ledger);
}

std::string LedgerJson(const SynthLedger& ledger) {
  Json j;
  Json planted = Json::object();
  for (EntityLabel label : kEntityLabels) {
    planted[std::string(LabelName(label))] = ledger.planted[static_cast<int>(label)];
  }
  j["planted"] = planted;
  j["future_mentions"] = ledger.future_mentions;
  j["future_unseen_mentions"] = ledger.future_unseen_mentions;
  Json lex = Json::object();
  for (EntityLabel label : kEntityLabels) {
    const int i = static_cast<int>(label);
    Json entry;
    for (const char* side : {"past", "future"}) {
      const auto& list = std::string(side) == "past" ? ledger.lexicons.past[i]
                                                     : ledger.lexicons.future[i];
      std::vector<std::string> words;
      for (const auto& w : list) words.push_back(EncodeUtf8(w));
      entry[side] = words;
    }
    lex[std::string(LabelName(label))] = entry;
  }
  j["lexicons"] = lex;
  return j.dump(2) + "\n";
}

std::pair<std::string, std::string> StatsTables(
    const std::map<std::string, CorpusStats>& by_reign,
    const std::map<std::string, std::string>& period_of) {
  std::string md =
      "| Reign | Period | Paragraphs | Characters | Distinct characters | Mean paragraph length "
      "| PERSON | LOCATION | BOOK |\n|---|---|---:|---:|---:|---:|---:|---:|---:|\n";
  std::string csv =
      "reign,period,paragraphs,characters,distinct_characters,mean_paragraph_length,PERSON,"
      "LOCATION,BOOK\n";
  for (const auto& [reign, s] : by_reign) {
    auto count = [&](EntityLabel l) {
      auto it = s.entity_counts.find(l);
      return std::to_string(it == s.entity_counts.end() ? 0 : it->second);
    };
    const std::string period = period_of.count(reign) ? period_of.at(reign) : "unused";
    md += "| " + reign + " | " + period + " | " + std::to_string(s.paragraph_count) + " | " +
          std::to_string(s.char_count) + " | " + std::to_string(s.distinct_chars) + " | " +
          Fixed(s.mean_paragraph_length, 2) + " | " + count(EntityLabel::kPerson) + " | " +
          count(EntityLabel::kLocation) + " | " + count(EntityLabel::kBook) + " |\n";
    csv += reign + "," + period + "," + std::to_string(s.paragraph_count) + "," +
           std::to_string(s.char_count) + "," + std::to_string(s.distinct_chars) + "," +
           FormatDouble(s.mean_paragraph_length) + "," + count(EntityLabel::kPerson) + "," +
           count(EntityLabel::kLocation) + "," + count(EntityLabel::kBook) + "\n";
  }
  md += "\nCounts are taken on the unmarked text.\n";
  return {md, csv};
}

std::string WriteStats(const ExperimentConfig& config, const CorpusSet& corpora) {
  const OutputLayout layout(config.out);
  std::vector<AnnotatedParagraph> all;
  std::map<std::string, std::string> period_of;
  for (Period period : kPeriods) {
    for (const auto& p : corpora.Get(period, CorpusStyle::kUnmarked)) {
      all.push_back(p);
      period_of[p.reign] = std::string(PeriodName(period));
    }
  }
  auto [md, csv] = StatsTables(StatsByReign(all), period_of);
  WriteText(layout.StatsMarkdown(), md);
  WriteText(layout.StatsCsv(), csv);
  return md;
}

std::vector<std::u32string> Texts(const std::vector<AnnotatedParagraph>& ps, Split split) {
  std::vector<std::u32string> out;
  for (const auto& p : ps) {
    if (p.split == split && !p.text.empty()) out.push_back(p.text);
  }
  return out;
}

struct LoadedLms {
  CharLanguageModel forward;
  CharLanguageModel backward;
};

LoadedLms LoadLms(const OutputLayout& layout) {
  Require(layout.ForwardLm(), "pretrain");
  Require(layout.BackwardLm(), "pretrain");
  return {DecodeLanguageModel(ReadFileBytes(layout.ForwardLm())),
          DecodeLanguageModel(ReadFileBytes(layout.BackwardLm()))};
}

ModelFactory FactoryFor(const OutputLayout& layout) {
  auto lms = std::make_shared<LoadedLms>(LoadLms(layout));
  return [lms](const std::string& model) {
    return MakeProvider(model, lms->forward, lms->backward);
  };
}

std::string ModelSummary(const PathMatrix& matrix) {
  std::string out = "| Model | Path | Runs | Mean micro-F1 | Std |\n|---|---|---:|---:|---:|\n";
  for (const auto& [key, runs] : matrix.cells) {
    std::vector<double> f1;
    for (const auto& [seed, r] : runs) f1.push_back(r.micro().f1());
    double mean = 0;
    for (double v : f1) mean += v;
    mean /= static_cast<double>(f1.size());
    double sd = 0;
    if (f1.size() > 1) sd = std::sqrt(Summarize(f1).variance);
    out += "| " + key.first + " | " + std::string(1, key.second) + " | " +
           std::to_string(f1.size()) + " | " + Fixed(mean, 4) + " | " + Fixed(sd, 4) + " |\n";
  }
  return out;
}

}  // namespace

std::filesystem::path OutputLayout::Variant(Period period, CorpusStyle style) const {
  return root / "corpus" /
         (std::string(PeriodName(period)) + "_" + std::string(StyleName(style)) + ".jsonl");
}

std::filesystem::path OutputLayout::Predictions(const std::string& model, CorpusStyle style,
                                                uint64_t seed) const {
  return root / "predictions" /
         (model + "-" + std::string(StyleName(style)) + "-seed" + std::to_string(seed) + ".jsonl");
}

CorpusSet LoadCorpusSet(const OutputLayout& layout) {
  CorpusSet set;
  for (Period period : kPeriods) {
    for (CorpusStyle style : kStyles) {
      const auto path = layout.Variant(period, style);
      Require(path, "prepare");
      set.Set(period, style, ParseCorpusFile(path));
    }
  }
  return set;
}

std::string RunSynth(const ExperimentConfig& config) {
  return TimedStage(config, "synth", [&] {
    const OutputLayout layout(config.out);
    SynthLedger ledger;
    const auto corpus = GenerateSynthetic(config.synth, config.seed, &ledger);
    WriteCorpusFile(layout.Synthetic(), corpus);
    WriteText(layout.SynthLedgerFile(), LedgerJson(ledger));
    return "wrote " + std::to_string(corpus.size()) + " paragraphs to " +
           layout.Synthetic().string() + "\n";
  });
}

std::string RunPrepare(const ExperimentConfig& config) {
  return TimedStage(config, "prepare", [&] {
    const OutputLayout layout(config.out);
    SynthLedger ledger;
    const auto corpus = LoadSource(config, &ledger);
    const auto split = SplitTemporal(corpus, config.past_reigns, config.future_reigns,
                                     DeriveSeed(config.seed, "split"), config.ratios);
    if (config.corpus_source == "synthetic") {
      WriteCorpusFile(layout.Synthetic(), corpus);
      WriteText(layout.SynthLedgerFile(), LedgerJson(ledger));
    }
    CorpusSet set;
    for (Period period : kPeriods) {
      const auto& side = period == Period::kPast ? split.past : split.future;
      for (CorpusStyle style : kStyles) {
        auto variant = MakeVariant(side, style);
        WriteCorpusFile(layout.Variant(period, style), variant.paragraphs);
        set.Set(period, style, std::move(variant.paragraphs));
      }
    }
    std::string summary = "past paragraphs: " + std::to_string(split.past.size()) +
                          ", future paragraphs: " + std::to_string(split.future.size()) + "\n\n";
    return summary + WriteStats(config, set);
  });
}

std::string RunStats(const ExperimentConfig& config) {
  return TimedStage(config, "stats", [&] {
    return WriteStats(config, LoadCorpusSet(OutputLayout(config.out)));
  });
}

std::string RunPretrain(const ExperimentConfig& config) {
  const OutputLayout layout(config.out);
  for (CorpusStyle style : kStyles) Require(layout.Variant(Period::kPast, style), "prepare");
  return TimedStage(config, "pretrain", [&] {
    std::vector<std::u32string> train, dev;
    for (CorpusStyle style : kStyles) {
      const auto ps = ParseCorpusFile(layout.Variant(Period::kPast, style));
      auto t = Texts(ps, Split::kTrain);
      auto d = Texts(ps, Split::kDev);
      train.insert(train.end(), t.begin(), t.end());
      dev.insert(dev.end(), d.begin(), d.end());
    }
    if (train.empty()) throw DataError("the past corpus has no training paragraphs");
    const auto lms =
        PretrainCharLm(train, dev, config.lm, DeriveSeed(config.seed, "pretrain"), config.jobs);
    WriteText(layout.ForwardLm(), EncodeLanguageModel(lms.forward));
    WriteText(layout.BackwardLm(), EncodeLanguageModel(lms.backward));
    std::string log = "direction,epoch,mean_loss,tokens_per_sec,dev_perplexity\n";
    std::string summary = "vocabulary size " + std::to_string(lms.forward.vocab().size()) + "\n";
    for (const auto* l : {&lms.forward_log, &lms.backward_log}) {
      const char* dir = l == &lms.forward_log ? "forward" : "backward";
      for (const auto& e : l->epochs) {
        log += std::string(dir) + "," + std::to_string(e.epoch) + "," + FormatDouble(e.mean_loss) +
               "," + FormatDouble(e.tokens_per_sec) + "," + FormatDouble(e.dev_metric) + "\n";
      }
      if (!l->epochs.empty()) {
        summary += std::string(dir) + ": dev perplexity " + Fixed(l->epochs.back().dev_metric, 3) +
                   " after " + std::to_string(l->epochs.size()) + " epochs\n";
      }
    }
    WriteText(layout.PretrainLog(), log);
    return summary;
  });
}

std::string RunTrain(const ExperimentConfig& config, const std::string& model, CorpusStyle style,
                     uint64_t seed) {
  if (std::find(config.models.begin(), config.models.end(), model) == config.models.end()) {
    throw ConfigError("model '" + model + "' is not listed in run.models");
  }
  const OutputLayout layout(config.out);
  CorpusSet corpora = LoadCorpusSet(layout);
  ModelFactory factory = FactoryFor(layout);
  return TimedStage(config, "train", [&] {
    TrainCache cache(&corpora, factory, config.tagger, layout.Taggers());
    const TrainedModel m = cache.Get(model, style, seed);
    const auto& eval = corpora.Get(Period::kPast, style);
    std::string lines;
    for (const auto& p : eval) {
      if (p.split != Split::kTest) continue;
      const auto spans = Predict(*m.tagger, p);
      lines += SerializeParagraph(p, &spans) + "\n";
    }
    WriteText(layout.Predictions(model, style, seed), lines);
    const EvalResult r = EvaluateOnTest(*m.tagger, eval);
    return "checkpoint " + cache.CheckpointPath(model, style, seed).string() +
           (m.loaded_from_disk ? " (reused)" : "") + "\npast/" + std::string(StyleName(style)) +
           " test micro-F1 " + Fixed(r.micro().f1(), 4) + "\n";
  });
}

std::string RunPaths(const ExperimentConfig& config) {
  const OutputLayout layout(config.out);
  CorpusSet corpora = LoadCorpusSet(layout);
  ModelFactory factory = FactoryFor(layout);
  return TimedStage(config, "paths", [&] {
    TrainCache cache(&corpora, factory, config.tagger, layout.Taggers());
    const PathMatrix matrix = RunAllPaths(config.models, config.seeds, cache, corpora, config.jobs);
    WriteText(layout.Results(), ResultsCsv(matrix));
    WriteText(layout.Boxplot(), BoxplotCsv(matrix));
    return ModelSummary(matrix) + "\ntrained " + std::to_string(cache.trained_count()) +
           " tagger(s); the rest were reused from " + layout.Taggers().string() + "\n";
  });
}

std::string RunHypotheses(const ExperimentConfig& config) {
  const OutputLayout layout(config.out);
  Require(layout.Results(), "paths");
  return TimedStage(config, "hypotheses", [&] {
    const PathMatrix matrix = ReadResultsCsv(layout.Results());
    const auto outcomes = TestHypotheses(matrix, config.alpha, config.stats_models);
    WriteText(layout.HypothesesMarkdownFile(), HypothesesMarkdown(outcomes, config.alpha));
    WriteText(layout.HypothesesCsvFile(), HypothesesCsv(outcomes));
    std::string out;
    for (const auto& o : outcomes) out += FormatHypothesisRow(o) + "\n";
    return out;
  });
}

std::string RunReport(const ExperimentConfig& config) {
  const OutputLayout layout(config.out);
  Require(layout.Results(), "paths");
  return TimedStage(config, "report", [&] {
    std::string md = "# Experiment report\n\nConfiguration digest: `" + config.digest + "`\n\n";
    md += "## Corpus\n\n";
    md += std::filesystem::exists(layout.StatsMarkdown()) ? ReadText(layout.StatsMarkdown())
                                                          : "(not available)\n";
    md += "\n## Language models\n\n";
    if (std::filesystem::exists(layout.ForwardLm()) && std::filesystem::exists(layout.BackwardLm())) {
      const auto lms = LoadLms(layout);
      const CorpusSet corpora = LoadCorpusSet(layout);
      const auto test = Texts(corpora.Get(Period::kPast, CorpusStyle::kUnmarked), Split::kTest);
      const auto future = Texts(corpora.Get(Period::kFuture, CorpusStyle::kUnmarked), Split::kTest);
      md += "| Direction | Past test perplexity | Future test perplexity |\n|---|---:|---:|\n";
      for (const auto* lm : {&lms.forward, &lms.backward}) {
        md += std::string("| ") + (lm == &lms.forward ? "forward" : "backward") + " | " +
              (test.empty() ? "n/a" : Fixed(CorpusPerplexity(*lm, test), 4)) + " | " +
              (future.empty() ? "n/a" : Fixed(CorpusPerplexity(*lm, future), 4)) + " |\n";
      }
    } else {
      md += "(not available)\n";
    }
    const PathMatrix matrix = ReadResultsCsv(layout.Results());
    md += "\n## Transfer paths\n\n" + ModelSummary(matrix);
    md += "\n## Hypotheses\n\n";
    md += std::filesystem::exists(layout.HypothesesMarkdownFile())
              ? ReadText(layout.HypothesesMarkdownFile())
              : "(run 'hypotheses' first)\n";
    WriteText(layout.Report(), md);
    return "wrote " + layout.Report().string() + "\n";
  });
}

}  // namespace chrononer
