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

#include "pipeline/config.h"

#include <filesystem>
#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "common/error.h"

namespace chrononer {
namespace {

void ExpectConfigError(Config c, const std::string& needle) {
  try {
    ResolveConfig(c);
    FAIL() << "expected a ConfigError mentioning " << needle;
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(ConfigTest, DefaultsResolve) {
  const ExperimentConfig c = ResolveConfig(Config());
  EXPECT_EQ(c.seeds, (std::vector<uint64_t>{1, 2, 3}));
  EXPECT_EQ(c.models, (std::vector<std::string>{"charlm", "static"}));
  EXPECT_EQ(c.corpus_source, "synthetic");
  EXPECT_EQ(c.alpha, 0.005);
  EXPECT_EQ(c.synth.past_paragraphs, 2000);
  EXPECT_EQ(c.synth.future_paragraphs, 500);
  EXPECT_EQ(c.synth.drift, 0.5);
  EXPECT_EQ(c.digest.size(), 64u);
  std::set<std::string> names;
  for (const auto& k : ConfigSchema()) {
    EXPECT_TRUE(names.insert(k.name).second) << k.name;
    EXPECT_NE(k.name.find('.'), std::string::npos) << k.name;
    EXPECT_FALSE(k.help.empty()) << k.name;
  }
}

TEST(ConfigTest, IniAndOverrides) {
  Config c;
  c.LoadString("; comment\n[lm]\nepochs = 2\nd_h = 8\n\n[run]\nseeds = 4, 5\n");
  c.Set("tagger.optimizer", "sgd");
  const ExperimentConfig r = ResolveConfig(c);
  EXPECT_EQ(r.lm.epochs, 2);
  EXPECT_EQ(r.lm.d_h, 8);
  EXPECT_EQ(r.seeds, (std::vector<uint64_t>{4, 5}));
  EXPECT_EQ(r.tagger.optimizer, "sgd");
  EXPECT_EQ(c.Get("lm.epochs"), "2");
}

TEST(ConfigTest, RejectsUnknownKeysAndMalformedFiles) {
  Config c;
  EXPECT_THROW(c.LoadString("[lm]\nepoch = 2\n"), ConfigError);
  EXPECT_THROW(c.LoadString("epochs = 2\n"), ConfigError);
  EXPECT_THROW(c.LoadString("[lm\nepochs = 2\n"), ConfigError);
  EXPECT_THROW(c.Set("lm.nope", "1"), ConfigError);
  EXPECT_THROW(c.Get("nope"), ConfigError);
  EXPECT_THROW(c.LoadFile("/nonexistent/chrononer.ini"), ConfigError);
}

TEST(ConfigTest, LoadFile) {
  const auto path = std::filesystem::temp_directory_path() / "chrononer_config_test.ini";
  std::ofstream(path) << "[synth]\ndrift = 0.25\n";
  Config c;
  c.LoadFile(path);
  EXPECT_EQ(ResolveConfig(c).synth.drift, 0.25);
  std::filesystem::remove(path);
}

TEST(ConfigTest, Validation) {
  auto with = [](const std::string& key, const std::string& value) {
    Config c;
    c.Set(key, value);
    return c;
  };
  ExpectConfigError(with("run.models", "charlm,bert"), "run.models");
  ExpectConfigError(with("run.models", ""), "run.models");
  ExpectConfigError(with("run.seeds", "1,1"), "run.seeds");
  ExpectConfigError(with("run.seeds", "x"), "run.seeds");
  ExpectConfigError(with("lm.epochs", "-1"), "lm.epochs");
  ExpectConfigError(with("lm.lr", "abc"), "lm.lr");
  ExpectConfigError(with("synth.drift", "1.5"), "synth.drift");
  ExpectConfigError(with("stats.alpha", "0"), "stats.alpha");
  ExpectConfigError(with("corpus.source", "web"), "corpus.source");
  ExpectConfigError(with("corpus.source", "file"), "corpus.path");
  ExpectConfigError(with("corpus.train_ratio", "0.9"), "ratio");
  ExpectConfigError(with("tagger.optimizer", "rmsprop"), "tagger.optimizer");
  ExpectConfigError(with("tagger.overlap", "300"), "tagger.overlap");
  ExpectConfigError(with("stats.models", "charlm,bert"), "stats.models");
  ExpectConfigError(with("corpus.future_reigns", "injo"), "injo");
}

TEST(ConfigTest, DigestCoversResultsOnly) {
  auto digest = [](const std::string& key, const std::string& value) {
    Config c;
    c.Set(key, value);
    return ResolveConfig(c).digest;
  };
  const std::string base = ResolveConfig(Config()).digest;
  EXPECT_EQ(digest("run.out", "elsewhere"), base);
  EXPECT_EQ(digest("run.jobs", "4"), base);
  EXPECT_NE(digest("run.seed", "8"), base);
  EXPECT_NE(digest("tagger.lr", "0.02"), base);
  EXPECT_NE(digest("synth.drift", "0.4"), base);
  // Equivalent spellings normalize to the same digest.
  EXPECT_EQ(digest("lm.lr", "5"), base);
}

}  // namespace
}  // namespace chrononer
