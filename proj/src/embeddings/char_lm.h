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

#ifndef CHRONONER_EMBEDDINGS_CHAR_LM_H_
#define CHRONONER_EMBEDDINGS_CHAR_LM_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "common/checkpoint.h"
#include "embeddings/lstm.h"
#include "embeddings/params.h"
#include "embeddings/vocabulary.h"

namespace chrononer {

enum class Direction : uint8_t { kForward = 0, kBackward = 1 };

struct LmHyperparams {
  int d_emb = 64;
  int d_h = 128;
  double lr = 1.0;
  int epochs = 10;
  int batch = 32;
  int bptt = 64;
  double clip = 5.0;
  int min_count = 1;
  double init_scale = 0.1;
};

// One row per completed epoch.
struct EpochRecord {
  int epoch = 0;
  double mean_loss = 0.0;
  double tokens_per_sec = 0.0;
  // Dev perplexity for language models, dev micro-F1 for taggers.
  double dev_metric = 0.0;
};

struct TrainingLog {
  std::string metric_name;
  std::vector<EpochRecord> epochs;
};

// Next-character model: embedding lookup, one LSTM layer, softmax output.
// A backward model reads every text right to left. Each text is read as
// BOS followed by its characters.
class CharLanguageModel {
 public:
  CharLanguageModel() = default;

  static CharLanguageModel Initialize(Direction direction, Vocabulary vocab,
                                      const LmHyperparams& hp, uint64_t seed);

  Direction direction() const { return direction_; }
  const LmHyperparams& hyperparams() const { return hp_; }
  const Vocabulary& vocab() const { return vocab_; }
  int embedding_size() const { return static_cast<int>(embedding_.rows()); }
  int hidden_size() const { return lstm_.hidden_size(); }

  // Ids in reading order: BOS, then the characters (reversed when backward).
  std::vector<int> ReadingOrder(std::u32string_view text) const;

  // Column i is the hidden state right after the model consumed text[i].
  Eigen::MatrixXd HiddenStates(std::u32string_view text) const;

  // Column k is the next-character distribution after BOS and the first k
  // characters in reading order; n+1 columns in total.
  Eigen::MatrixXd Distributions(std::u32string_view text) const;

  // Sum of next-character negative log-likelihoods over the characters of
  // `text` (EOS excluded).
  double TotalNll(std::u32string_view text) const;

  // Mean cross-entropy of a steps x batch window (step-major ids). When
  // `grads` is non-null, gradients are accumulated in NamedParameters order.
  double WindowLoss(const std::vector<int>& inputs, const std::vector<int>& targets, int steps,
                    int batch, const LstmState& initial, GradientList* grads,
                    LstmState* final_state) const;

  ParameterList NamedParameters();

  Eigen::MatrixXd& embedding() { return embedding_; }
  const Eigen::MatrixXd& embedding() const { return embedding_; }
  Eigen::MatrixXd& output_bias() { return out_b_; }
  Eigen::MatrixXd& output_weights() { return out_w_; }

  void Serialize(PayloadWriter& w) const;
  static CharLanguageModel Deserialize(PayloadReader& r);

 private:
  Eigen::MatrixXd Logits(const Eigen::MatrixXd& hidden) const;

  Direction direction_ = Direction::kForward;
  LmHyperparams hp_;
  Vocabulary vocab_;
  Eigen::MatrixXd embedding_;  // d_emb x V
  LstmLayer lstm_;
  Eigen::MatrixXd out_w_;  // V x d_h
  Eigen::MatrixXd out_b_;  // V x 1
};

// exp(mean next-character NLL). Throws DataError on empty text.
double Perplexity(const CharLanguageModel& lm, std::u32string_view text);

// Pooled perplexity over several texts.
double CorpusPerplexity(const CharLanguageModel& lm, const std::vector<std::u32string>& texts);

struct PretrainedLms {
  CharLanguageModel forward;
  CharLanguageModel backward;
  TrainingLog forward_log;
  TrainingLog backward_log;
};

// Builds the vocabulary from `train`, then trains both directions by SGD
// with global-norm clipping and truncated backpropagation. With `jobs` > 1
// the two directions train on separate threads; results do not depend on it.
// Throws DataError on an empty corpus and NumericalError on a non-finite loss.
PretrainedLms PretrainCharLm(const std::vector<std::u32string>& train,
                             const std::vector<std::u32string>& dev, const LmHyperparams& hp,
                             uint64_t seed, int jobs = 1);

// Trains one direction in place; exposed for tests.
TrainingLog TrainLanguageModel(CharLanguageModel& model, const std::vector<std::u32string>& train,
                               const std::vector<std::u32string>& dev, const LmHyperparams& hp,
                               uint64_t seed);

}  // namespace chrononer

#endif  // CHRONONER_EMBEDDINGS_CHAR_LM_H_
