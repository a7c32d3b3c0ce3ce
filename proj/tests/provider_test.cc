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

#include "embeddings/provider.h"

#include <cmath>

#include <gtest/gtest.h>

#include "common/error.h"
#include "common/random.h"

namespace chrononer {
namespace {

LmHyperparams Small(int d_h) {
  LmHyperparams hp;
  hp.d_emb = 4;
  hp.d_h = d_h;
  hp.epochs = 0;
  hp.init_scale = 0.3;
  return hp;
}

PretrainedLms Models(int d_h, int epochs = 0) {
  LmHyperparams hp = Small(d_h);
  hp.epochs = epochs;
  hp.lr = 2.0;
  hp.batch = 2;
  hp.bptt = 8;
  return PretrainCharLm({U"甲乙丙甲丁", U"丙乙甲乙丙", U"丁甲丙乙"}, {}, hp, 3);
}

TEST(ProviderTest, ContextualDimensionsAndEmptyInput) {
  const auto lms = Models(16);
  const Eigen::MatrixXd e = ContextualEmbed(lms.forward, lms.backward, U"甲乙");
  EXPECT_EQ(e.rows(), 32);
  EXPECT_EQ(e.cols(), 2);
  EXPECT_EQ(ContextualEmbed(lms.forward, lms.backward, U"").cols(), 0);
}

TEST(ProviderTest, ContextualHalvesSeeOnlyTheirSide) {
  const auto lms = Models(5);
  const Eigen::MatrixXd x = ContextualEmbed(lms.forward, lms.backward, U"甲乙丙");
  const Eigen::MatrixXd y = ContextualEmbed(lms.forward, lms.backward, U"甲乙丁");
  const Eigen::MatrixXd z = ContextualEmbed(lms.forward, lms.backward, U"丁乙丙");
  // Forward half at position 1 depends on text[0..1] only.
  EXPECT_EQ(x.block(0, 1, 5, 1), y.block(0, 1, 5, 1));
  EXPECT_NE(x.block(0, 1, 5, 1), z.block(0, 1, 5, 1));
  // Backward half at position 1 depends on text[1..] only.
  EXPECT_EQ(x.block(5, 1, 5, 1), z.block(5, 1, 5, 1));
  EXPECT_NE(x.block(5, 1, 5, 1), y.block(5, 1, 5, 1));
}

TEST(ProviderTest, TrainedModelIsContextual) {
  const auto lms = Models(8, 3);
  const Eigen::MatrixXd e = ContextualEmbed(lms.forward, lms.backward, U"甲乙丙乙甲");
  // Same character, different surroundings.
  EXPECT_GT((e.col(1) - e.col(3)).norm(), 1e-6);
  EXPECT_GT((e.col(0) - e.col(4)).norm(), 1e-6);
}

TEST(ProviderTest, StaticLookup) {
  const Vocabulary vocab = Vocabulary::Build({U"ab"}, 1);
  Eigen::MatrixXd table(3, vocab.size());
  for (int j = 0; j < vocab.size(); ++j) table.col(j).setConstant(j);
  const Eigen::MatrixXd e = StaticEmbed(vocab, table, U"abaz");
  EXPECT_EQ(e.rows(), 3);
  ASSERT_EQ(e.cols(), 4);
  EXPECT_EQ(e.col(0), e.col(2));
  EXPECT_EQ(e.col(0), table.col(vocab.Id(U'a')));
  EXPECT_EQ(e.col(3), table.col(Vocabulary::kUnk));
  EXPECT_THROW(StaticLookupProvider(vocab, Eigen::MatrixXd::Zero(3, 2)), ConfigError);
}

TEST(ProviderTest, ContractAndSectionRoundTrip) {
  const auto lms = Models(6, 1);
  Rng rng(5);
  const std::u32string alphabet = U"甲乙丙丁戊己";  // last two unseen
  for (const char* name : {"charlm", "static"}) {
    const ProviderPtr p = MakeProvider(name, lms.forward, lms.backward);
    EXPECT_EQ(p->kind(), name);
    EXPECT_EQ(p->dimension(), std::string(name) == "charlm" ? 12 : 4);
    const ProviderPtr back = ProviderFromSections(p->Sections());
    EXPECT_EQ(back->kind(), name);
    for (int trial = 0; trial < 20; ++trial) {
      std::u32string text;
      const int n = static_cast<int>(rng.Below(12));
      for (int i = 0; i < n; ++i) text += alphabet[rng.Below(alphabet.size())];
      const Eigen::MatrixXd e = p->Embed(text);
      EXPECT_EQ(e.rows(), p->dimension());
      EXPECT_EQ(e.cols(), n);
      EXPECT_TRUE(e.allFinite());
      EXPECT_EQ(back->Embed(text), e);
    }
  }
}

TEST(ProviderTest, Errors) {
  const auto lms = Models(4);
  EXPECT_THROW(MakeProvider("bert", lms.forward, lms.backward), ConfigError);
  EXPECT_THROW(ContextualLmProvider(lms.forward, lms.forward), ConfigError);
  const auto other = PretrainCharLm({U"xyz"}, {}, Small(4), 1);
  EXPECT_THROW(ContextualLmProvider(lms.forward, other.backward), ConfigError);
  EXPECT_THROW(ProviderFromSections({}), DataError);
}

TEST(ProviderTest, LanguageModelRoundTripThroughProvider) {
  const auto lms = Models(4, 1);
  const CharLanguageModel back = DecodeLanguageModel(EncodeLanguageModel(lms.forward));
  EXPECT_EQ(ContextualEmbed(back, lms.backward, U"甲乙"),
            ContextualEmbed(lms.forward, lms.backward, U"甲乙"));
}

}  // namespace
}  // namespace chrononer
