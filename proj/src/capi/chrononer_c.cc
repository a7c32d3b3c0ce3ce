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

#include "chrononer/chrononer.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <sstream>
#include <string>

#include "json.hpp"

#include "common/checkpoint.h"
#include "common/error.h"
#include "common/utf8.h"
#include "corpus/corpus.h"
#include "embeddings/char_lm.h"
#include "embeddings/provider.h"
#include "evaluation/scoring.h"
#include "pipeline/config.h"
#include "pipeline/pipeline.h"
#include "stats/welch.h"
#include "tagger/tagger.h"

struct chrononer_config {
  chrononer::Config config;
};

struct chrononer_tagger {
  chrononer::CrfTagger model;
};

struct chrononer_lm {
  chrononer::CharLanguageModel model;
};

namespace {

using chrononer::ConfigError;
using chrononer::DataError;

thread_local std::string g_last_error;

template <typename Fn>
chrononer_status Guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CHRONONER_OK;
  } catch (const chrononer::ConfigError& e) {
    g_last_error = e.what();
    return CHRONONER_CONFIG_ERROR;
  } catch (const chrononer::DataError& e) {
    g_last_error = e.what();
    return CHRONONER_DATA_ERROR;
  } catch (const chrononer::NumericalError& e) {
    g_last_error = e.what();
    return CHRONONER_NUMERICAL_ERROR;
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return CHRONONER_DATA_ERROR;
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
    return CHRONONER_INTERNAL_ERROR;
  } catch (...) {
    g_last_error = "internal error: unknown exception";
    return CHRONONER_INTERNAL_ERROR;
  }
}

void Require(const void* p, const char* what) {
  if (p == nullptr) throw ConfigError(std::string(what) + " must not be NULL");
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void Emit(char** out, const std::string& s) {
  if (out != nullptr) *out = CopyString(s);
}

chrononer::AnnotatedParagraph ParseRecord(const char* record) {
  Require(record, "record");
  std::istringstream in{std::string(record)};
  auto ps = chrononer::ParseCorpus(in);
  if (ps.size() != 1) throw DataError("expected exactly one paragraph record");
  return ps[0];
}

std::vector<chrononer::EntitySpan> ParseSpans(const char* text) {
  Require(text, "span list");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("span list is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw DataError("span list must be a JSON array");
  std::vector<chrononer::EntitySpan> out;
  for (const auto& s : j) {
    if (!s.is_object() || !s.contains("start") || !s.contains("end") || !s.contains("label") ||
        !s["start"].is_number_integer() || !s["end"].is_number_integer() ||
        !s["label"].is_string()) {
      throw DataError("span objects need integer start/end and a string label");
    }
    auto label = chrononer::ParseLabel(s["label"].get<std::string>());
    if (!label) throw DataError("unknown entity label " + s["label"].dump());
    chrononer::EntitySpan span;
    span.start = s["start"].get<int>();
    span.end = s["end"].get<int>();
    span.label = *label;
    if (span.start < 0 || span.end <= span.start) throw DataError("span has invalid bounds");
    out.push_back(span);
  }
  return out;
}

}  // namespace

extern "C" {

const char* chrononer_version(void) { return CHRONONER_VERSION; }

const char* chrononer_last_error(void) { return g_last_error.c_str(); }

void chrononer_string_free(char* s) { std::free(s); }

chrononer_status chrononer_config_new(chrononer_config** out) {
  return Guard([&] {
    Require(out, "out");
    *out = new chrononer_config();
  });
}

void chrononer_config_free(chrononer_config* config) { delete config; }

chrononer_status chrononer_config_load_file(chrononer_config* config, const char* path) {
  return Guard([&] {
    Require(config, "config");
    Require(path, "path");
    config->config.LoadFile(path);
  });
}

chrononer_status chrononer_config_set(chrononer_config* config, const char* key,
                                      const char* value) {
  return Guard([&] {
    Require(config, "config");
    Require(key, "key");
    Require(value, "value");
    config->config.Set(key, value);
  });
}

chrononer_status chrononer_config_get(const chrononer_config* config, const char* key,
                                      char** value) {
  return Guard([&] {
    Require(config, "config");
    Require(key, "key");
    Require(value, "value");
    Emit(value, config->config.Get(key));
  });
}

chrononer_status chrononer_config_validate(const chrononer_config* config, char** digest) {
  return Guard([&] {
    Require(config, "config");
    Emit(digest, chrononer::ResolveConfig(config->config).digest);
  });
}

size_t chrononer_config_key_count(void) { return chrononer::ConfigSchema().size(); }

const char* chrononer_config_key_name(size_t index) {
  const auto& s = chrononer::ConfigSchema();
  return index < s.size() ? s[index].name.c_str() : nullptr;
}

const char* chrononer_config_key_default(size_t index) {
  const auto& s = chrononer::ConfigSchema();
  return index < s.size() ? s[index].default_value.c_str() : nullptr;
}

const char* chrononer_config_key_help(size_t index) {
  const auto& s = chrononer::ConfigSchema();
  return index < s.size() ? s[index].help.c_str() : nullptr;
}

chrononer_status chrononer_run_stage(const chrononer_config* config, const char* stage,
                                     char** summary) {
  return Guard([&] {
    Require(config, "config");
    Require(stage, "stage");
    const chrononer::ExperimentConfig c = chrononer::ResolveConfig(config->config);
    const std::string name = stage;
    std::string text;
    if (name == "synth") {
      text = chrononer::RunSynth(c);
    } else if (name == "prepare") {
      text = chrononer::RunPrepare(c);
    } else if (name == "stats") {
      text = chrononer::RunStats(c);
    } else if (name == "pretrain") {
      text = chrononer::RunPretrain(c);
    } else if (name == "paths") {
      text = chrononer::RunPaths(c);
    } else if (name == "hypotheses") {
      text = chrononer::RunHypotheses(c);
    } else if (name == "report") {
      text = chrononer::RunReport(c);
    } else {
      throw ConfigError("unknown stage '" + name + "'");
    }
    Emit(summary, text);
  });
}

chrononer_status chrononer_run_train(const chrononer_config* config, const char* model,
                                     const char* style, uint64_t seed, char** summary) {
  return Guard([&] {
    Require(config, "config");
    Require(model, "model");
    Require(style, "style");
    const auto parsed = chrononer::ParseStyle(style);
    if (!parsed) throw ConfigError(std::string("unknown style '") + style + "'");
    const chrononer::ExperimentConfig c = chrononer::ResolveConfig(config->config);
    Emit(summary, chrononer::RunTrain(c, model, *parsed, seed));
  });
}

chrononer_status chrononer_tagger_load(const char* path, chrononer_tagger** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    if (!std::filesystem::exists(path)) throw DataError(std::string("no such file: ") + path);
    auto t = std::make_unique<chrononer_tagger>();
    t->model = chrononer::CrfTagger::Decode(chrononer::ReadFileBytes(path));
    *out = t.release();
  });
}

void chrononer_tagger_free(chrononer_tagger* tagger) { delete tagger; }

chrononer_status chrononer_tagger_predict(const chrononer_tagger* tagger, const char* text,
                                          char** spans_json) {
  return Guard([&] {
    Require(tagger, "tagger");
    Require(text, "text");
    Require(spans_json, "spans_json");
    const auto spans = tagger->model.PredictSpans(chrononer::DecodeUtf8(text));
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& s : spans) {
      j.push_back({{"start", s.start}, {"end", s.end}, {"label", chrononer::LabelName(s.label)}});
    }
    Emit(spans_json, j.dump());
  });
}

chrononer_status chrononer_lm_load(const char* path, chrononer_lm** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    if (!std::filesystem::exists(path)) throw DataError(std::string("no such file: ") + path);
    auto lm = std::make_unique<chrononer_lm>();
    lm->model = chrononer::DecodeLanguageModel(chrononer::ReadFileBytes(path));
    *out = lm.release();
  });
}

void chrononer_lm_free(chrononer_lm* lm) { delete lm; }

chrononer_status chrononer_lm_perplexity(const chrononer_lm* lm, const char* text,
                                         double* perplexity) {
  return Guard([&] {
    Require(lm, "lm");
    Require(text, "text");
    Require(perplexity, "perplexity");
    *perplexity = chrononer::Perplexity(lm->model, chrononer::DecodeUtf8(text));
  });
}

chrononer_status chrononer_corpus_strip_markers(const char* record, char** result) {
  return Guard([&] {
    Require(result, "result");
    Emit(result, chrononer::SerializeParagraph(chrononer::StripMarkers(ParseRecord(record))));
  });
}

chrononer_status chrononer_corpus_add_markers(const char* record, char** result) {
  return Guard([&] {
    Require(result, "result");
    Emit(result, chrononer::SerializeParagraph(chrononer::AddMarkerView(ParseRecord(record))));
  });
}

chrononer_status chrononer_corpus_stats(const char* path, char** stats_json) {
  return Guard([&] {
    Require(path, "path");
    Require(stats_json, "stats_json");
    if (!std::filesystem::exists(path)) throw DataError(std::string("no such file: ") + path);
    const auto corpus = chrononer::ParseCorpusFile(path);
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [reign, s] : chrononer::StatsByReign(corpus)) {
      nlohmann::ordered_json counts = nlohmann::ordered_json::object();
      for (auto label : chrononer::kEntityLabels) {
        auto it = s.entity_counts.find(label);
        counts[std::string(chrononer::LabelName(label))] =
            it == s.entity_counts.end() ? 0 : it->second;
      }
      j[reign] = {{"paragraphs", s.paragraph_count},
                  {"characters", s.char_count},
                  {"distinct_characters", s.distinct_chars},
                  {"mean_paragraph_length", s.mean_paragraph_length},
                  {"entities", counts}};
    }
    Emit(stats_json, j.dump());
  });
}

chrononer_status chrononer_score_spans(const char* gold_json, const char* predicted_json,
                                       chrononer_prf* micro) {
  return Guard([&] {
    Require(micro, "micro");
    const auto r = chrononer::ScoreSpans(ParseSpans(gold_json), ParseSpans(predicted_json));
    const auto m = r.micro();
    *micro = {m.tp, m.fp, m.fn, m.precision(), m.recall(), m.f1()};
  });
}

chrononer_status chrononer_welch_t(const double* a, size_t na, const double* b, size_t nb,
                                   chrononer_ttest* out) {
  return Guard([&] {
    Require(out, "out");
    if (na > 0) Require(a, "a");
    if (nb > 0) Require(b, "b");
    const auto r = chrononer::WelchT(chrononer::Summarize(std::vector<double>(a, a + na)),
                                     chrononer::Summarize(std::vector<double>(b, b + nb)));
    *out = {r.t_stat, r.df, r.p_value, r.mean_a, r.mean_b};
  });
}

chrononer_status chrononer_student_t_sf(double t, double df, double* out) {
  return Guard([&] {
    Require(out, "out");
    *out = chrononer::StudentTSf(t, df);
  });
}

}  // extern "C"
