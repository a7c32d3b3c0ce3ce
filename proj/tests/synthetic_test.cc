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

#include "corpus/synthetic.h"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "common/error.h"
#include "corpus/corpus.h"
#include "tests/properties.h"

namespace chrononer {
namespace {

SynthConfig Config(int past, int future, double drift, uint64_t seed = 1) {
  SynthConfig c = DefaultSynthConfig(seed);
  c.past_paragraphs = past;
  c.future_paragraphs = future;
  c.drift = drift;
  return c;
}

TEST(SyntheticTest, ZeroParagraphs) {
  EXPECT_TRUE(GenerateSynthetic(Config(0, 0, 0.5), 3).empty());
}

TEST(SyntheticTest, ParagraphsAreValidStandoff) {
  const auto corpus = GenerateSynthetic(Config(200, 50, 0.5), 4);
  ASSERT_EQ(corpus.size(), 250u);
  const auto& glyphs = DefaultGlyphs();
  for (const auto& p : corpus) {
    ValidateParagraph(p);
    EXPECT_GE(static_cast<int>(p.text.size()), 24);
    EXPECT_LE(static_cast<int>(p.text.size()), 48 + 24);  // one clause of overshoot
    for (char32_t c : p.text) EXPECT_FALSE(glyphs.IsGlyph(c));
  }
  EXPECT_EQ(corpus.front().reign, "injo");
  EXPECT_EQ(corpus.back().reign, "soonjong");
  EXPECT_EQ(corpus.front().id, "injo-000001");
}

TEST(SyntheticTest, Deterministic) {
  EXPECT_EQ(GenerateSynthetic(Config(50, 20, 0.3), 9), GenerateSynthetic(Config(50, 20, 0.3), 9));
  EXPECT_NE(GenerateSynthetic(Config(50, 20, 0.3), 9), GenerateSynthetic(Config(50, 20, 0.3), 10));
}

TEST(SyntheticTest, NoDriftKeepsLexicons) {
  const auto lex = BuildPeriodLexicons(Config(1, 1, 0.0), 2);
  EXPECT_EQ(lex.past, lex.future);
  EXPECT_TRUE(lex.unseen.empty());
}

TEST(SyntheticTest, DriftReplacesRequestedFraction) {
  SynthLedger ledger;
  GenerateSynthetic(Config(0, 1000, 0.5), 5, &ledger);
  for (int i = 0; i < 3; ++i) {
    const auto& past = ledger.lexicons.past[i];
    const auto& fut = ledger.lexicons.future[i];
    ASSERT_EQ(past.size(), fut.size());
    const std::set<std::u32string> past_set(past.begin(), past.end());
    int fresh = 0;
    for (const auto& w : fut) fresh += past_set.count(w) == 0;
    EXPECT_EQ(fresh, static_cast<int>(std::lround(0.5 * static_cast<double>(past.size()))));
  }
  // Each mention is unseen with probability ~0.5; allow 4 standard errors.
  const double n = static_cast<double>(ledger.future_mentions);
  ASSERT_GT(n, 500);
  const double frac = static_cast<double>(ledger.future_unseen_mentions) / n;
  EXPECT_NEAR(frac, 0.5, 4 * std::sqrt(0.25 / n));
}

TEST(SyntheticTest, LedgerMatchesCorpusStats) {
  SynthLedger ledger;
  const auto corpus = GenerateSynthetic(Config(300, 100, 0.5), 6, &ledger);
  const auto stats = ComputeCorpusStats(corpus);
  for (EntityLabel l : kEntityLabels) {
    const auto it = stats.entity_counts.find(l);
    EXPECT_EQ(it == stats.entity_counts.end() ? 0 : it->second,
              ledger.planted[static_cast<int>(l)]);
  }
}

TEST(SyntheticTest, RoundTripProperties) {
  const auto corpus = GenerateSynthetic(Config(1500, 500, 0.5), 7);
  const auto t = testing::CheckCorpusRoundTrips(corpus);
  EXPECT_EQ(t.paragraphs, 2000);
  EXPECT_GT(t.entities, 1000);
  EXPECT_EQ(t.failures(), 0) << t.first_failure;
}

TEST(SyntheticTest, RejectsInconsistentConfig) {
  SynthConfig c = Config(5, 5, 0.0);
  c.lexicons[0].clear();
  EXPECT_THROW(GenerateSynthetic(c, 1), ConfigError);
  c = Config(5, 5, 0.0);
  c.min_length = 50;
  c.max_length = 10;
  EXPECT_THROW(GenerateSynthetic(c, 1), ConfigError);
}

}  // namespace
}  // namespace chrononer
