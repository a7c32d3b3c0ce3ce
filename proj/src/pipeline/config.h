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

#ifndef CHRONONER_PIPELINE_CONFIG_H_
#define CHRONONER_PIPELINE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "corpus/corpus.h"
#include "corpus/synthetic.h"
#include "embeddings/char_lm.h"
#include "tagger/tagger.h"

namespace chrononer {

struct ConfigKey {
  std::string name;  // dotted, e.g. "lm.epochs"
  std::string default_value;
  std::string help;
};

// Every recognized key in a stable order.
const std::vector<ConfigKey>& ConfigSchema();

// Raw key/value settings: schema defaults, then an INI file whose sections
// supply the first part of each dotted name, then individual overrides.
class Config {
 public:
  Config();

  // Throws ConfigError if the file is missing, malformed or sets an unknown
  // key.
  void LoadFile(const std::filesystem::path& path);
  void LoadString(std::string_view ini);
  // Throws ConfigError for an unknown key.
  void Set(std::string_view key, std::string_view value);
  const std::string& Get(std::string_view key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct ExperimentConfig {
  std::filesystem::path out;
  uint64_t seed = 0;
  std::vector<uint64_t> seeds;
  int jobs = 1;
  std::vector<std::string> models;

  std::string corpus_source;  // "synthetic" or "file"
  std::filesystem::path corpus_path;
  std::set<std::string> past_reigns;
  std::set<std::string> future_reigns;
  SplitRatios ratios;

  SynthConfig synth;
  LmHyperparams lm;
  TaggerHyperparams tagger;

  double alpha = 0.005;
  // Models pooled for the hypothesis tests; empty means all.
  std::vector<std::string> stats_models;

  // Normalized key=value lines of every setting that can change results
  // (everything except run.out and run.jobs), and their SHA-256.
  std::string canonical;
  std::string digest;
};

// Model names accepted in run.models.
const std::vector<std::string>& KnownModels();

// Parses and validates every setting; throws ConfigError naming the key.
ExperimentConfig ResolveConfig(const Config& config);

}  // namespace chrononer

#endif  // CHRONONER_PIPELINE_CONFIG_H_
