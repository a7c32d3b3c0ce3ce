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

#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include "common/error.h"
#include "common/random.h"

namespace chrononer {
namespace {

// Column-wise softmax, in place.
void SoftmaxColumns(Eigen::MatrixXd& logits) {
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    auto col = logits.col(j);
    col.array() -= col.maxCoeff();
    col = col.array().exp().matrix();
    col /= col.sum();
  }
}

Eigen::MatrixXd Gather(const Eigen::MatrixXd& table, const std::vector<int>& ids) {
  Eigen::MatrixXd out(table.rows(), static_cast<Eigen::Index>(ids.size()));
  for (size_t k = 0; k < ids.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = table.col(ids[k]);
  return out;
}

}  // namespace

CharLanguageModel CharLanguageModel::Initialize(Direction direction, Vocabulary vocab,
                                                const LmHyperparams& hp, uint64_t seed) {
  if (hp.d_emb < 1 || hp.d_h < 1) throw ConfigError("language model sizes must be positive");
  CharLanguageModel m;
  m.direction_ = direction;
  m.hp_ = hp;
  m.vocab_ = std::move(vocab);
  const int v = m.vocab_.size();
  Rng rng(DeriveSeed(seed, direction == Direction::kForward ? "lm/init/forward"
                                                            : "lm/init/backward"));
  m.embedding_.resize(hp.d_emb, v);
  InitUniform(m.embedding_, rng, hp.init_scale);
  m.lstm_.Init(hp.d_emb, hp.d_h, rng, hp.init_scale);
  m.out_w_.resize(v, hp.d_h);
  m.out_b_.resize(v, 1);
  InitUniform(m.out_w_, rng, hp.init_scale);
  InitUniform(m.out_b_, rng, hp.init_scale);
  RoundParameters(m.NamedParameters());
  return m;
}

std::vector<int> CharLanguageModel::ReadingOrder(std::u32string_view text) const {
  std::vector<int> ids;
  ids.reserve(text.size() + 1);
  ids.push_back(Vocabulary::kBos);
  if (direction_ == Direction::kForward) {
    for (char32_t c : text) ids.push_back(vocab_.Id(c));
  } else {
    for (auto it = text.rbegin(); it != text.rend(); ++it) ids.push_back(vocab_.Id(*it));
  }
  return ids;
}

Eigen::MatrixXd CharLanguageModel::Logits(const Eigen::MatrixXd& hidden) const {
  Eigen::MatrixXd logits = out_w_ * hidden;
  logits.colwise() += out_b_.col(0);
  return logits;
}

Eigen::MatrixXd CharLanguageModel::HiddenStates(std::u32string_view text) const {
  const int n = static_cast<int>(text.size());
  Eigen::MatrixXd out(hidden_size(), n);
  if (n == 0) return out;
  const auto ids = ReadingOrder(text);
  LstmTrace trace;
  LstmForward(lstm_, Gather(embedding_, ids), n + 1, 1, LstmState::Zero(hidden_size(), 1), &trace);
  for (int i = 0; i < n; ++i) {
    out.col(i) = trace.h.col(direction_ == Direction::kForward ? i + 1 : n - i);
  }
  return out;
}

Eigen::MatrixXd CharLanguageModel::Distributions(std::u32string_view text) const {
  const auto ids = ReadingOrder(text);
  LstmTrace trace;
  LstmForward(lstm_, Gather(embedding_, ids), static_cast<int>(ids.size()), 1,
              LstmState::Zero(hidden_size(), 1), &trace);
  Eigen::MatrixXd probs = Logits(trace.h);
  SoftmaxColumns(probs);
  return probs;
}

double CharLanguageModel::TotalNll(std::u32string_view text) const {
  if (text.empty()) return 0.0;
  const auto ids = ReadingOrder(text);
  const Eigen::MatrixXd probs = Distributions(text);
  double nll = 0.0;
  for (size_t k = 1; k < ids.size(); ++k) {
    nll -= std::log(probs(ids[k], static_cast<Eigen::Index>(k - 1)));
  }
  return nll;
}

double CharLanguageModel::WindowLoss(const std::vector<int>& inputs,
                                     const std::vector<int>& targets, int steps, int batch,
                                     const LstmState& initial, GradientList* grads,
                                     LstmState* final_state) const {
  const Eigen::Index n = static_cast<Eigen::Index>(steps) * batch;
  LstmTrace trace;
  LstmForward(lstm_, Gather(embedding_, inputs), steps, batch, initial, &trace);
  if (final_state != nullptr) *final_state = trace.Final();
  Eigen::MatrixXd probs = Logits(trace.h);
  SoftmaxColumns(probs);
  double loss = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) loss -= std::log(probs(targets[k], k));
  loss /= static_cast<double>(n);
  if (grads == nullptr) return loss;

  // d loss / d logits = (p - onehot) / n
  Eigen::MatrixXd& dlogits = probs;
  for (Eigen::Index k = 0; k < n; ++k) dlogits(targets[k], k) -= 1.0;
  dlogits /= static_cast<double>(n);
  auto& g = *grads;
  g[4].noalias() += dlogits * trace.h.transpose();
  g[5].col(0) += dlogits.rowwise().sum();
  const Eigen::MatrixXd dh = out_w_.transpose() * dlogits;
  LstmGrads lg{std::move(g[1]), std::move(g[2]), std::move(g[3])};
  Eigen::MatrixXd dx;
  LstmBackward(lstm_, trace, dh, &lg, &dx);
  g[1] = std::move(lg.wx);
  g[2] = std::move(lg.wh);
  g[3] = std::move(lg.b);
  for (Eigen::Index k = 0; k < n; ++k) g[0].col(inputs[k]) += dx.col(k);
  return loss;
}

ParameterList CharLanguageModel::NamedParameters() {
  return {{"embedding", &embedding_}, {"lstm.wx", &lstm_.wx}, {"lstm.wh", &lstm_.wh},
          {"lstm.b", &lstm_.b},       {"output.w", &out_w_},  {"output.b", &out_b_}};
}

void CharLanguageModel::Serialize(PayloadWriter& w) const {
  w.U32(static_cast<uint32_t>(direction_));
  w.U32(static_cast<uint32_t>(hp_.d_emb));
  w.U32(static_cast<uint32_t>(hp_.d_h));
  w.F64(hp_.lr);
  w.U32(static_cast<uint32_t>(hp_.epochs));
  w.U32(static_cast<uint32_t>(hp_.batch));
  w.U32(static_cast<uint32_t>(hp_.bptt));
  w.F64(hp_.clip);
  w.U32(static_cast<uint32_t>(hp_.min_count));
  w.F64(hp_.init_scale);
  vocab_.Serialize(w);
  w.Tensor(embedding_);
  lstm_.Serialize(w);
  w.Tensor(out_w_);
  w.Tensor(out_b_);
}

CharLanguageModel CharLanguageModel::Deserialize(PayloadReader& r) {
  CharLanguageModel m;
  const uint32_t dir = r.U32();
  if (dir > 1) throw DataError("checkpoint has an unknown language model direction");
  m.direction_ = static_cast<Direction>(dir);
  m.hp_.d_emb = static_cast<int>(r.U32());
  m.hp_.d_h = static_cast<int>(r.U32());
  m.hp_.lr = r.F64();
  m.hp_.epochs = static_cast<int>(r.U32());
  m.hp_.batch = static_cast<int>(r.U32());
  m.hp_.bptt = static_cast<int>(r.U32());
  m.hp_.clip = r.F64();
  m.hp_.min_count = static_cast<int>(r.U32());
  m.hp_.init_scale = r.F64();
  m.vocab_ = Vocabulary::Deserialize(r);
  m.embedding_ = r.Tensor();
  m.lstm_ = LstmLayer::Deserialize(r);
  m.out_w_ = r.Tensor();
  m.out_b_ = r.Tensor();
  const int v = m.vocab_.size();
  if (m.embedding_.rows() != m.hp_.d_emb || m.embedding_.cols() != v ||
      m.lstm_.input_size() != m.hp_.d_emb || m.lstm_.hidden_size() != m.hp_.d_h ||
      m.out_w_.rows() != v || m.out_w_.cols() != m.hp_.d_h || m.out_b_.rows() != v) {
    throw DataError("checkpoint language model tensors have inconsistent shapes");
  }
  return m;
}

double Perplexity(const CharLanguageModel& lm, std::u32string_view text) {
  if (text.empty()) throw DataError("perplexity of an empty text is undefined");
  return std::exp(lm.TotalNll(text) / static_cast<double>(text.size()));
}

double CorpusPerplexity(const CharLanguageModel& lm, const std::vector<std::u32string>& texts) {
  double nll = 0.0;
  size_t count = 0;
  for (const auto& t : texts) {
    nll += lm.TotalNll(t);
    count += t.size();
  }
  if (count == 0) throw DataError("perplexity of an empty corpus is undefined");
  return std::exp(nll / static_cast<double>(count));
}

TrainingLog TrainLanguageModel(CharLanguageModel& model, const std::vector<std::u32string>& train,
                               const std::vector<std::u32string>& dev, const LmHyperparams& hp,
                               uint64_t seed) {
  TrainingLog log;
  log.metric_name = "dev_perplexity";
  if (hp.epochs <= 0) return log;
  size_t total_chars = 0;
  for (const auto& t : train) total_chars += t.size();
  if (train.empty() || total_chars == 0) {
    throw DataError("cannot pretrain a language model on an empty corpus");
  }
  if (hp.batch < 1 || hp.bptt < 1) throw ConfigError("batch and bptt must be positive");
  const auto& dev_texts = dev.empty() ? train : dev;
  const bool forward = model.direction() == Direction::kForward;
  Rng rng(DeriveSeed(seed, forward ? "lm/train/forward" : "lm/train/backward"));
  ParameterList params = model.NamedParameters();
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    const auto t_start = std::chrono::steady_clock::now();
    rng.Shuffle(order);
    std::vector<int> stream;
    stream.reserve(total_chars + 2 * train.size());
    for (size_t idx : order) {
      const auto ids = model.ReadingOrder(train[idx]);
      stream.insert(stream.end(), ids.begin(), ids.end());
      stream.push_back(Vocabulary::kEos);
    }
    const size_t pairs = stream.size() - 1;
    const int batch = static_cast<int>(std::min<size_t>(hp.batch, pairs));
    const size_t len = pairs / batch;
    LstmState state = LstmState::Zero(model.hidden_size(), batch);
    double loss_sum = 0.0;
    size_t tokens = 0;
    std::vector<int> inputs, targets;
    for (size_t t0 = 0; t0 < len; t0 += hp.bptt) {
      const int steps = static_cast<int>(std::min<size_t>(hp.bptt, len - t0));
      inputs.resize(static_cast<size_t>(steps) * batch);
      targets.resize(inputs.size());
      for (int t = 0; t < steps; ++t) {
        for (int b = 0; b < batch; ++b) {
          const size_t pos = b * len + t0 + t;
          inputs[t * batch + b] = stream[pos];
          targets[t * batch + b] = stream[pos + 1];
        }
      }
      GradientList grads = ZeroGradients(params);
      LstmState next;
      const double loss = model.WindowLoss(inputs, targets, steps, batch, state, &grads, &next);
      if (!std::isfinite(loss)) {
        throw NumericalError("language model loss became non-finite in epoch " +
                             std::to_string(epoch) + " (learning rate too high?)");
      }
      ClipByGlobalNorm(grads, hp.clip);
      SgdStep(params, grads, hp.lr);
      state = std::move(next);
      loss_sum += loss * static_cast<double>(inputs.size());
      tokens += inputs.size();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_loss = tokens > 0 ? loss_sum / static_cast<double>(tokens) : 0.0;
    rec.tokens_per_sec = secs > 0 ? static_cast<double>(tokens) / secs : 0.0;
    rec.dev_metric = CorpusPerplexity(model, dev_texts);
    if (!std::isfinite(rec.dev_metric)) {
      throw NumericalError("language model dev perplexity became non-finite");
    }
    log.epochs.push_back(rec);
  }
  RoundParameters(params);
  return log;
}

PretrainedLms PretrainCharLm(const std::vector<std::u32string>& train,
                             const std::vector<std::u32string>& dev, const LmHyperparams& hp,
                             uint64_t seed, int jobs) {
  Vocabulary vocab = Vocabulary::Build(train, hp.min_count);
  PretrainedLms out;
  out.forward = CharLanguageModel::Initialize(Direction::kForward, vocab, hp, seed);
  out.backward = CharLanguageModel::Initialize(Direction::kBackward, vocab, hp, seed);
  if (jobs > 1) {
    std::exception_ptr failure;
    std::thread worker([&] {
      try {
        out.backward_log = TrainLanguageModel(out.backward, train, dev, hp, seed);
      } catch (...) {
        failure = std::current_exception();
      }
    });
    try {
      out.forward_log = TrainLanguageModel(out.forward, train, dev, hp, seed);
    } catch (...) {
      worker.join();
      throw;
    }
    worker.join();
    if (failure) std::rethrow_exception(failure);
  } else {
    out.forward_log = TrainLanguageModel(out.forward, train, dev, hp, seed);
    out.backward_log = TrainLanguageModel(out.backward, train, dev, hp, seed);
  }
  return out;
}

}  // namespace chrononer
