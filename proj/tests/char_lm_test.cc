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

#include "embeddings/char_lm.h"

#include <cmath>

#include <gtest/gtest.h>

#include "common/error.h"
#include "embeddings/lstm.h"
#include "embeddings/provider.h"
#include "tests/oracles.h"

namespace chrononer {
namespace {

LmHyperparams Tiny() {
  LmHyperparams hp;
  hp.d_emb = 3;
  hp.d_h = 4;
  hp.init_scale = 0.5;
  return hp;
}

TEST(VocabularyTest, OrderAndReservedIds) {
  const Vocabulary v = Vocabulary::Build({U"bcab", U"cc"}, 1);
  // c x3, b x2, a x1.
  EXPECT_EQ(v.size(), 7);
  EXPECT_EQ(v.Id(U'c'), 4);
  EXPECT_EQ(v.Id(U'b'), 5);
  EXPECT_EQ(v.Id(U'a'), 6);
  EXPECT_EQ(v.Id(U'z'), Vocabulary::kUnk);
  EXPECT_EQ(v.Char(5), U'b');
  const Vocabulary ties = Vocabulary::Build({U"ba"}, 1);
  EXPECT_EQ(ties.Id(U'a'), 4);
  EXPECT_EQ(Vocabulary::Build({U"aab"}, 2).size(), 5);
  EXPECT_THROW(Vocabulary::Build({}, 1), DataError);
  PayloadWriter w;
  v.Serialize(w);
  PayloadReader r(w.bytes());
  EXPECT_EQ(Vocabulary::Deserialize(r), v);
}

TEST(LstmTest, StepMajorBatchMatchesSingleSequences) {
  Rng rng(3);
  LstmLayer layer;
  layer.Init(2, 3, rng, 0.5);
  Eigen::MatrixXd x(2, 6);  // 3 steps x 2 sequences
  InitUniform(x, rng, 1.0);
  LstmTrace both;
  LstmForward(layer, x, 3, 2, LstmState::Zero(3, 2), &both);
  for (int b = 0; b < 2; ++b) {
    Eigen::MatrixXd xs(2, 3);
    for (int t = 0; t < 3; ++t) xs.col(t) = x.col(t * 2 + b);
    LstmTrace one;
    LstmForward(layer, xs, 3, 1, LstmState::Zero(3, 1), &one);
    for (int t = 0; t < 3; ++t) {
      EXPECT_LT((one.h.col(t) - both.h.col(t * 2 + b)).norm(), 1e-14);
    }
  }
}

TEST(LstmTest, GradientsMatchFiniteDifferences) {
  Rng rng(5);
  LstmLayer layer;
  layer.Init(3, 2, rng, 0.7);
  Eigen::MatrixXd x(3, 8);
  InitUniform(x, rng, 1.0);
  Eigen::MatrixXd w(2, 8);  // loss = sum(w .* h)
  InitUniform(w, rng, 1.0);
  LstmState init = LstmState::Zero(2, 2);
  InitUniform(init.h, rng, 0.5);
  InitUniform(init.c, rng, 0.5);
  auto loss = [&] {
    LstmTrace tr;
    LstmForward(layer, x, 4, 2, init, &tr);
    return (tr.h.array() * w.array()).sum();
  };
  LstmTrace tr;
  LstmForward(layer, x, 4, 2, init, &tr);
  LstmGrads g = LstmGrads::ZeroLike(layer);
  Eigen::MatrixXd dx;
  LstmBackward(layer, tr, w, &g, &dx);
  ParameterList params = {{"wx", &layer.wx}, {"wh", &layer.wh}, {"b", &layer.b}, {"x", &x}};
  for (const auto& r : testing::CheckGradients(params, {g.wx, g.wh, g.b, dx}, loss)) {
    EXPECT_LT(r.max_rel_error, 1e-6) << r.tensor;
  }
}

TEST(CharLmTest, GradientsMatchFiniteDifferences) {
  for (Direction dir : {Direction::kForward, Direction::kBackward}) {
    const Vocabulary vocab = Vocabulary::Build({U"abcab"}, 1);
    CharLanguageModel lm = CharLanguageModel::Initialize(dir, vocab, Tiny(), 11);
    const std::vector<int> inputs = {1, 4, 5, 6, 4, 1, 5};
    const std::vector<int> targets = {4, 5, 6, 4, 2, 5, 0};
    // Odd length on purpose: steps 3 x batch 2 uses the first six.
    const std::vector<int> in6(inputs.begin(), inputs.begin() + 6);
    const std::vector<int> tg6(targets.begin(), targets.begin() + 6);
    LstmState init = LstmState::Zero(4, 2);
    init.h.setConstant(0.1);
    ParameterList params = lm.NamedParameters();
    ASSERT_EQ(params.size(), 6u);
    GradientList grads = ZeroGradients(params);
    lm.WindowLoss(in6, tg6, 3, 2, init, &grads, nullptr);
    auto loss = [&] { return lm.WindowLoss(in6, tg6, 3, 2, init, nullptr, nullptr); };
    for (const auto& r : testing::CheckGradients(params, grads, loss)) {
      EXPECT_LT(r.max_rel_error, 1e-4) << r.tensor;
      EXPECT_GT(r.max_abs_analytic, 0.0) << r.tensor;
    }
  }
}

TEST(CharLmTest, UniformModelHasVocabularyPerplexity) {
  const Vocabulary vocab = Vocabulary::Build({U"abcdefg"}, 1);
  CharLanguageModel lm = CharLanguageModel::Initialize(Direction::kForward, vocab, Tiny(), 1);
  lm.output_weights().setZero();
  lm.output_bias().setZero();
  EXPECT_NEAR(Perplexity(lm, U"abcabcg"), vocab.size(), 1e-6);
  EXPECT_NEAR(Perplexity(lm, U"xyz"), vocab.size(), 1e-6);
  EXPECT_THROW(Perplexity(lm, U""), DataError);
  const Eigen::MatrixXd d = lm.Distributions(U"ab");
  EXPECT_EQ(d.cols(), 3);
  EXPECT_NEAR(d.col(0).sum(), 1.0, 1e-12);
}

TEST(CharLmTest, PerplexityIsAtLeastOneAndMatchesNll) {
  const Vocabulary vocab = Vocabulary::Build({U"abcd"}, 1);
  const CharLanguageModel lm =
      CharLanguageModel::Initialize(Direction::kBackward, vocab, Tiny(), 2);
  const double ppl = Perplexity(lm, U"abdc");
  EXPECT_GE(ppl, 1.0);
  EXPECT_NEAR(std::log(ppl), lm.TotalNll(U"abdc") / 4, 1e-12);
  EXPECT_EQ(lm.ReadingOrder(U"ab"), (std::vector<int>{Vocabulary::kBos, vocab.Id(U'b'),
                                                      vocab.Id(U'a')}));
}

TEST(CharLmTest, HandBuiltModelPerplexity) {
  // Constant softmax output: perplexity follows from the bias alone.
  const Vocabulary vocab = Vocabulary::Build({U"ab"}, 1);
  CharLanguageModel lm = CharLanguageModel::Initialize(Direction::kForward, vocab, Tiny(), 3);
  lm.output_weights().setZero();
  Eigen::VectorXd bias = Eigen::VectorXd::Zero(vocab.size());
  bias(vocab.Id(U'a')) = 1.0;
  bias(vocab.Id(U'b')) = -0.5;
  lm.output_bias() = bias;
  const double log_norm = std::log(bias.array().exp().sum());
  const double nll_a = log_norm - 1.0, nll_b = log_norm + 0.5;
  EXPECT_NEAR(Perplexity(lm, U"abba"), std::exp((2 * nll_a + 2 * nll_b) / 4), 1e-12);
  const Eigen::MatrixXd d = lm.Distributions(U"abba");
  for (int j = 0; j < d.cols(); ++j) EXPECT_NEAR(d.col(j).sum(), 1.0, 1e-12);
  // A model that is certain of the next character has perplexity one.
  bias.setZero();
  bias(vocab.Id(U'a')) = 50.0;
  lm.output_bias() = bias;
  EXPECT_NEAR(Perplexity(lm, U"aaaaaa"), 1.0, 1e-6);
}

TEST(CharLmTest, LearnsRepeatingTrigram) {
  std::vector<std::u32string> train, dev;
  std::u32string text;
  for (int i = 0; i < 40; ++i) text += U"abc";
  for (int i = 0; i < 8; ++i) train.push_back(text);
  dev.push_back(text.substr(0, 60));
  LmHyperparams hp;
  hp.d_emb = 8;
  hp.d_h = 16;
  hp.lr = 2.0;
  hp.epochs = 10;
  hp.batch = 4;
  hp.bptt = 20;
  const auto lms = PretrainCharLm(train, dev, hp, 9);
  ASSERT_EQ(lms.forward_log.epochs.size(), 10u);
  EXPECT_EQ(lms.forward_log.metric_name, "dev_perplexity");
  EXPECT_LT(lms.forward_log.epochs.back().dev_metric, 1.2);
  EXPECT_LT(lms.backward_log.epochs.back().dev_metric, 1.2);
  EXPECT_LT(lms.forward_log.epochs.back().dev_metric, lms.forward_log.epochs.front().dev_metric);
  for (const auto& e : lms.forward_log.epochs) {
    EXPECT_TRUE(std::isfinite(e.mean_loss));
    EXPECT_GT(e.tokens_per_sec, 0.0);
  }
}

TEST(CharLmTest, ZeroEpochsAndDeterminism) {
  const std::vector<std::u32string> train = {U"abcabd", U"dcba"};
  LmHyperparams hp = Tiny();
  hp.epochs = 0;
  const auto a = PretrainCharLm(train, {}, hp, 4);
  EXPECT_TRUE(a.forward_log.epochs.empty());
  const CharLanguageModel init = CharLanguageModel::Initialize(
      Direction::kForward, Vocabulary::Build(train, hp.min_count), hp, 4);
  EXPECT_EQ(EncodeLanguageModel(a.forward), EncodeLanguageModel(init));
  hp.epochs = 2;
  const auto b = PretrainCharLm(train, {}, hp, 4);
  const auto c = PretrainCharLm(train, {}, hp, 4, 2);
  EXPECT_EQ(EncodeLanguageModel(b.forward), EncodeLanguageModel(c.forward));
  EXPECT_EQ(EncodeLanguageModel(b.backward), EncodeLanguageModel(c.backward));
  EXPECT_NE(EncodeLanguageModel(a.forward), EncodeLanguageModel(b.forward));
}

TEST(CharLmTest, CheckpointRoundTripIsExact) {
  const std::vector<std::u32string> train = {U"甲乙丙甲乙", U"丙丁"};
  LmHyperparams hp = Tiny();
  hp.epochs = 1;
  const auto lms = PretrainCharLm(train, {}, hp, 1);
  const std::string bytes = EncodeLanguageModel(lms.backward);
  const CharLanguageModel back = DecodeLanguageModel(bytes);
  EXPECT_EQ(EncodeLanguageModel(back), bytes);
  EXPECT_EQ(back.direction(), Direction::kBackward);
  EXPECT_EQ(Perplexity(back, U"甲乙丙"), Perplexity(lms.backward, U"甲乙丙"));
  EXPECT_THROW(DecodeLanguageModel(bytes.substr(0, 10)), DataError);
  EXPECT_THROW(DecodeLanguageModel("garbage"), DataError);
}

}  // namespace
}  // namespace chrononer
