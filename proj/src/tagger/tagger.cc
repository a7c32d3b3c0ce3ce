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

#include "tagger/tagger.h"

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <numeric>
#include <tuple>

#include "common/error.h"
#include "common/random.h"
#include "evaluation/scoring.h"
#include "tagger/crf.h"

namespace chrononer {
namespace {

std::vector<int> ToIndices(const std::vector<Tag>& tags) {
  std::vector<int> out(tags.size());
  for (size_t i = 0; i < tags.size(); ++i) out[i] = static_cast<int>(tags[i]);
  return out;
}

std::vector<Tag> FromIndices(const std::vector<int>& idx) {
  std::vector<Tag> out(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) out[i] = static_cast<Tag>(idx[i]);
  return out;
}

void CheckHyperparams(const TaggerHyperparams& hp) {
  if (hp.d_t < 1) throw ConfigError("tagger hidden size must be positive");
  if (hp.batch < 1) throw ConfigError("tagger batch size must be positive");
  if (hp.max_len < 2 || hp.overlap < 0 || hp.overlap >= hp.max_len) {
    throw ConfigError("tagger max_len/overlap must satisfy 0 <= overlap < max_len");
  }
  if (hp.optimizer != "adam" && hp.optimizer != "sgd") {
    throw ConfigError("unknown tagger optimizer '" + hp.optimizer + "' (expected adam or sgd)");
  }
}

}  // namespace

std::vector<Segment> TrainingSegments(std::u32string_view chars, int max_len, int overlap,
                                      const MarkerGlyphs& glyphs) {
  const int n = static_cast<int>(chars.size());
  std::vector<Segment> out;
  if (n == 0) return out;
  const char32_t boundary = glyphs.For(MarkerKind::kPhraseBoundary);
  int pos = 0;
  while (pos < n) {
    if (n - pos <= max_len) {
      out.push_back({pos, n - pos});
      break;
    }
    int cut = -1;
    for (int j = pos + max_len; j > pos; --j) {
      if (boundary != 0 && chars[j - 1] == boundary) {
        cut = j;
        break;
      }
    }
    if (cut > 0) {
      out.push_back({pos, cut - pos});
      pos = cut;
    } else {
      out.push_back({pos, max_len});
      pos += max_len - overlap;
    }
  }
  return out;
}

std::vector<Segment> PredictionWindows(int n, int max_len, int overlap) {
  std::vector<Segment> out;
  if (n <= 0) return out;
  int pos = 0;
  while (true) {
    if (n - pos <= max_len) {
      out.push_back({pos, n - pos});
      break;
    }
    out.push_back({pos, max_len});
    pos += max_len - overlap;
  }
  return out;
}

std::vector<EntitySpan> StitchWindowSpans(const std::vector<Segment>& windows,
                                          const std::vector<std::vector<EntitySpan>>& spans,
                                          int n) {
  struct Candidate {
    int margin;
    EntitySpan span;
  };
  std::vector<Candidate> cands;
  for (size_t w = 0; w < windows.size(); ++w) {
    const int ws = windows[w].start;
    const int we = ws + windows[w].length;
    for (const auto& s : spans[w]) {
      const bool left_cut = ws > 0 && s.start == ws;
      const bool right_cut = we < n && s.end == we;
      if (left_cut || right_cut) continue;
      const int left = ws == 0 ? INT_MAX : s.start - ws;
      const int right = we == n ? INT_MAX : we - s.end;
      cands.push_back({std::min(left, right), s});
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(b.margin, a.span) < std::tie(a.margin, b.span);
  });
  std::vector<EntitySpan> kept;
  for (const auto& c : cands) {
    bool clash = false;
    for (const auto& k : kept) {
      if (c.span.start < k.end && k.start < c.span.end) {
        clash = true;
        break;
      }
    }
    if (!clash) kept.push_back(c.span);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

CrfTagger CrfTagger::Initialize(ProviderPtr provider, const TaggerHyperparams& hp, uint64_t seed) {
  if (!provider) throw ConfigError("tagger needs an embedding provider");
  CheckHyperparams(hp);
  CrfTagger m;
  m.provider_ = std::move(provider);
  m.hp_ = hp;
  Rng rng(DeriveSeed(seed, "tagger/init"));
  const int in = m.provider_->dimension();
  m.forward_.Init(in, hp.d_t, rng, hp.init_scale);
  m.backward_.Init(in, hp.d_t, rng, hp.init_scale);
  m.proj_w_.resize(kNumTags, 2 * hp.d_t);
  m.proj_b_.resize(kNumTags, 1);
  m.transitions_.resize(kNumTags + 2, kNumTags + 2);
  InitUniform(m.proj_w_, rng, hp.init_scale);
  InitUniform(m.proj_b_, rng, hp.init_scale);
  InitUniform(m.transitions_, rng, hp.init_scale);
  RoundParameters(m.NamedParameters());
  return m;
}

ParameterList CrfTagger::NamedParameters() {
  return {{"forward.wx", &forward_.wx},   {"forward.wh", &forward_.wh},
          {"forward.b", &forward_.b},     {"backward.wx", &backward_.wx},
          {"backward.wh", &backward_.wh}, {"backward.b", &backward_.b},
          {"emission.w", &proj_w_},       {"emission.b", &proj_b_},
          {"transitions", &transitions_}};
}

Eigen::MatrixXd CrfTagger::Emissions(const Eigen::MatrixXd& features) const {
  const int n = static_cast<int>(features.cols());
  const int d = hp_.d_t;
  Eigen::MatrixXd reversed = features.rowwise().reverse();
  LstmTrace fwd, bwd;
  LstmForward(forward_, features, n, 1, LstmState::Zero(d, 1), &fwd);
  LstmForward(backward_, reversed, n, 1, LstmState::Zero(d, 1), &bwd);
  Eigen::MatrixXd hidden(2 * d, n);
  hidden.topRows(d) = fwd.h;
  hidden.bottomRows(d) = bwd.h.rowwise().reverse();
  Eigen::MatrixXd scores = proj_w_ * hidden;
  scores.colwise() += proj_b_.col(0);
  return scores.transpose();
}

double CrfTagger::BatchLoss(const std::vector<const Eigen::MatrixXd*>& features,
                            const std::vector<std::vector<int>>& gold,
                            GradientList* grads) const {
  const int batch = static_cast<int>(features.size());
  if (batch == 0 || gold.size() != features.size()) {
    throw DataError("tagger batch is empty or mismatched");
  }
  const int d = hp_.d_t;
  const int in = provider_->dimension();
  int steps = 0;
  for (int b = 0; b < batch; ++b) {
    if (features[b]->rows() != in) throw DataError("feature dimension mismatch");
    if (static_cast<size_t>(features[b]->cols()) != gold[b].size() || gold[b].empty()) {
      throw DataError("tag path length does not match sequence length");
    }
    steps = std::max(steps, static_cast<int>(features[b]->cols()));
  }
  Eigen::MatrixXd xf = Eigen::MatrixXd::Zero(in, static_cast<Eigen::Index>(steps) * batch);
  Eigen::MatrixXd xb = xf;
  for (int b = 0; b < batch; ++b) {
    const int len = static_cast<int>(features[b]->cols());
    for (int t = 0; t < len; ++t) {
      xf.col(t * batch + b) = features[b]->col(t);
      xb.col(t * batch + b) = features[b]->col(len - 1 - t);
    }
  }
  LstmTrace fwd, bwd;
  LstmForward(forward_, xf, steps, batch, LstmState::Zero(d, batch), &fwd);
  LstmForward(backward_, xb, steps, batch, LstmState::Zero(d, batch), &bwd);

  // Gather the valid positions of all sequences into one block.
  std::vector<int> offsets(batch + 1, 0);
  for (int b = 0; b < batch; ++b) offsets[b + 1] = offsets[b] + static_cast<int>(gold[b].size());
  Eigen::MatrixXd hidden(2 * d, offsets[batch]);
  for (int b = 0; b < batch; ++b) {
    const int len = static_cast<int>(gold[b].size());
    for (int t = 0; t < len; ++t) {
      hidden.col(offsets[b] + t).head(d) = fwd.h.col(t * batch + b);
      hidden.col(offsets[b] + t).tail(d) = bwd.h.col((len - 1 - t) * batch + b);
    }
  }
  Eigen::MatrixXd scores = proj_w_ * hidden;
  scores.colwise() += proj_b_.col(0);

  double loss = 0.0;
  Eigen::MatrixXd d_scores;
  Eigen::MatrixXd d_trans;
  if (grads != nullptr) {
    d_scores = Eigen::MatrixXd::Zero(kNumTags, offsets[batch]);
    d_trans = Eigen::MatrixXd::Zero(kNumTags + 2, kNumTags + 2);
  }
  for (int b = 0; b < batch; ++b) {
    const int len = static_cast<int>(gold[b].size());
    const Eigen::MatrixXd em = scores.middleCols(offsets[b], len).transpose();
    if (grads == nullptr) {
      loss += CrfNllLoss(em, transitions_, gold[b]);
    } else {
      Eigen::MatrixXd d_em = Eigen::MatrixXd::Zero(len, kNumTags);
      loss += CrfNllLoss(em, transitions_, gold[b], &d_em, &d_trans);
      d_scores.middleCols(offsets[b], len) = d_em.transpose();
    }
  }
  loss /= batch;
  if (grads == nullptr) return loss;

  const double scale = 1.0 / batch;
  d_scores *= scale;
  d_trans *= scale;
  auto& g = *grads;
  g[6].noalias() += d_scores * hidden.transpose();
  g[7].col(0) += d_scores.rowwise().sum();
  g[8] += d_trans;
  const Eigen::MatrixXd d_hidden = proj_w_.transpose() * d_scores;
  Eigen::MatrixXd dhf = Eigen::MatrixXd::Zero(d, static_cast<Eigen::Index>(steps) * batch);
  Eigen::MatrixXd dhb = dhf;
  for (int b = 0; b < batch; ++b) {
    const int len = static_cast<int>(gold[b].size());
    for (int t = 0; t < len; ++t) {
      dhf.col(t * batch + b) = d_hidden.col(offsets[b] + t).head(d);
      dhb.col((len - 1 - t) * batch + b) = d_hidden.col(offsets[b] + t).tail(d);
    }
  }
  LstmGrads gf{std::move(g[0]), std::move(g[1]), std::move(g[2])};
  LstmBackward(forward_, fwd, dhf, &gf, nullptr);
  g[0] = std::move(gf.wx), g[1] = std::move(gf.wh), g[2] = std::move(gf.b);
  LstmGrads gb{std::move(g[3]), std::move(g[4]), std::move(g[5])};
  LstmBackward(backward_, bwd, dhb, &gb, nullptr);
  g[3] = std::move(gb.wx), g[4] = std::move(gb.wh), g[5] = std::move(gb.b);
  return loss;
}

std::vector<EntitySpan> CrfTagger::PredictFromFeatures(const Eigen::MatrixXd& features) const {
  const int n = static_cast<int>(features.cols());
  if (n == 0) return {};
  const auto windows = PredictionWindows(n, hp_.max_len, hp_.overlap);
  std::vector<std::vector<EntitySpan>> per_window;
  per_window.reserve(windows.size());
  for (const auto& w : windows) {
    const auto path = ViterbiDecode(Emissions(features.middleCols(w.start, w.length)), transitions_);
    auto spans = SpansFromBio(FromIndices(path.tags));
    for (auto& s : spans) s.start += w.start, s.end += w.start;
    per_window.push_back(std::move(spans));
  }
  if (windows.size() == 1) return per_window[0];
  return StitchWindowSpans(windows, per_window, n);
}

std::vector<EntitySpan> CrfTagger::PredictSpans(std::u32string_view text) const {
  if (text.empty()) return {};
  return PredictFromFeatures(provider_->Embed(text));
}

std::vector<EntitySpan> Predict(const CrfTagger& model, const AnnotatedParagraph& p) {
  return model.PredictSpans(p.text);
}

std::string CrfTagger::Encode() const {
  auto sections = provider_->Sections();
  PayloadWriter w;
  w.U32(static_cast<uint32_t>(hp_.d_t));
  w.F64(hp_.lr);
  w.U32(static_cast<uint32_t>(hp_.epochs));
  w.U32(static_cast<uint32_t>(hp_.batch));
  w.F64(hp_.clip);
  w.U32(static_cast<uint32_t>(hp_.max_len));
  w.U32(static_cast<uint32_t>(hp_.overlap));
  w.String(hp_.optimizer);
  w.F64(hp_.init_scale);
  w.U32(static_cast<uint32_t>(provider_->dimension()));
  forward_.Serialize(w);
  backward_.Serialize(w);
  w.Tensor(proj_w_);
  w.Tensor(proj_b_);
  w.Tensor(transitions_);
  sections.push_back({std::string(kTaggerSection), w.bytes()});
  return EncodeCheckpoint(sections);
}

CrfTagger CrfTagger::Decode(std::string_view bytes) {
  auto sections = DecodeCheckpoint(bytes);
  if (sections.empty() || sections.back().tag != kTaggerSection) {
    throw DataError("checkpoint does not contain a TAGGER section");
  }
  CrfTagger m;
  PayloadReader r(sections.back().payload);
  m.hp_.d_t = static_cast<int>(r.U32());
  m.hp_.lr = r.F64();
  m.hp_.epochs = static_cast<int>(r.U32());
  m.hp_.batch = static_cast<int>(r.U32());
  m.hp_.clip = r.F64();
  m.hp_.max_len = static_cast<int>(r.U32());
  m.hp_.overlap = static_cast<int>(r.U32());
  m.hp_.optimizer = r.String();
  m.hp_.init_scale = r.F64();
  const int dim = static_cast<int>(r.U32());
  m.forward_ = LstmLayer::Deserialize(r);
  m.backward_ = LstmLayer::Deserialize(r);
  m.proj_w_ = r.Tensor();
  m.proj_b_ = r.Tensor();
  m.transitions_ = r.Tensor();
  if (!r.AtEnd()) throw DataError("trailing bytes in TAGGER section");
  sections.pop_back();
  m.provider_ = ProviderFromSections(sections);
  const int d = m.hp_.d_t;
  if (m.provider_->dimension() != dim || m.forward_.input_size() != dim ||
      m.backward_.input_size() != dim || m.forward_.hidden_size() != d ||
      m.backward_.hidden_size() != d || m.proj_w_.rows() != kNumTags ||
      m.proj_w_.cols() != 2 * d || m.proj_b_.rows() != kNumTags ||
      m.transitions_.rows() != kNumTags + 2 || m.transitions_.cols() != kNumTags + 2) {
    throw DataError("checkpoint tagger tensors have inconsistent shapes");
  }
  return m;
}

TrainedTagger TrainTagger(const std::vector<TaggedSequence>& train,
                          const std::vector<TaggedSequence>& dev, ProviderPtr provider,
                          const TaggerHyperparams& hp, uint64_t seed) {
  if (train.empty()) throw DataError("cannot train a tagger on an empty training set");
  CheckHyperparams(hp);
  TrainedTagger out;
  out.model = CrfTagger::Initialize(provider, hp, seed);
  out.log.metric_name = "dev_micro_f1";
  if (hp.epochs <= 0) return out;

  // Provider features are frozen, so they are computed once.
  struct Example {
    Eigen::MatrixXd features;
    std::vector<int> tags;
  };
  std::vector<Example> examples;
  for (const auto& seq : train) {
    if (seq.chars.size() != seq.tags.size()) throw DataError("tagged sequence length mismatch");
    if (seq.chars.empty()) continue;
    const Eigen::MatrixXd feats = provider->Embed(seq.chars);
    const auto tags = ToIndices(seq.tags);
    for (const auto& s : TrainingSegments(seq.chars, hp.max_len, hp.overlap)) {
      examples.push_back({feats.middleCols(s.start, s.length),
                          std::vector<int>(tags.begin() + s.start,
                                           tags.begin() + s.start + s.length)});
    }
  }
  if (examples.empty()) throw DataError("training set contains only empty sequences");
  const auto& dev_set = dev.empty() ? train : dev;
  std::vector<Eigen::MatrixXd> dev_features;
  std::vector<std::vector<EntitySpan>> dev_gold;
  for (const auto& seq : dev_set) {
    dev_features.push_back(provider->Embed(seq.chars));
    dev_gold.push_back(SpansFromBio(seq.tags));
  }

  CrfTagger& model = out.model;
  ParameterList params = model.NamedParameters();
  Adam adam(params, hp.lr);
  Rng rng(DeriveSeed(seed, "tagger/train"));
  std::vector<size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  double best_f1 = -1.0;
  GradientList best;

  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    const auto t_start = std::chrono::steady_clock::now();
    rng.Shuffle(order);
    double loss_sum = 0.0;
    size_t tokens = 0;
    for (size_t b0 = 0; b0 < order.size(); b0 += hp.batch) {
      const size_t b1 = std::min(order.size(), b0 + hp.batch);
      std::vector<const Eigen::MatrixXd*> feats;
      std::vector<std::vector<int>> gold;
      for (size_t k = b0; k < b1; ++k) {
        feats.push_back(&examples[order[k]].features);
        gold.push_back(examples[order[k]].tags);
        tokens += examples[order[k]].tags.size();
      }
      GradientList grads = ZeroGradients(params);
      const double loss = model.BatchLoss(feats, gold, &grads);
      if (!std::isfinite(loss)) {
        throw NumericalError("tagger loss became non-finite in epoch " + std::to_string(epoch));
      }
      ClipByGlobalNorm(grads, hp.clip);
      if (hp.optimizer == "adam") {
        adam.Step(params, grads);
      } else {
        SgdStep(params, grads, hp.lr);
      }
      loss_sum += loss * static_cast<double>(b1 - b0);
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    // Score the float-rounded parameters, which are what a checkpoint holds.
    GradientList exact;
    for (const auto& [name, p] : params) exact.push_back(*p);
    RoundParameters(params);
    std::vector<std::vector<EntitySpan>> predicted;
    for (const auto& f : dev_features) predicted.push_back(model.PredictFromFeatures(f));
    const double f1 = ScoreSpans(dev_gold, predicted).micro().f1();
    if (f1 > best_f1) {
      best_f1 = f1;
      best.clear();
      for (const auto& [name, p] : params) best.push_back(*p);
    }
    for (size_t i = 0; i < params.size(); ++i) *params[i].second = std::move(exact[i]);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_loss = loss_sum / static_cast<double>(order.size());
    rec.tokens_per_sec = secs > 0 ? static_cast<double>(tokens) / secs : 0.0;
    rec.dev_metric = f1;
    out.log.epochs.push_back(rec);
  }
  for (size_t i = 0; i < params.size(); ++i) *params[i].second = best[i];
  return out;
}

}  // namespace chrononer
