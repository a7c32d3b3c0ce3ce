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

#ifndef CHRONONER_TAGGER_TAGGER_H_
#define CHRONONER_TAGGER_TAGGER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "corpus/bio.h"
#include "corpus/corpus.h"
#include "embeddings/char_lm.h"
#include "embeddings/params.h"
#include "embeddings/provider.h"
#include "embeddings/lstm.h"

namespace chrononer {

// Tag indices follow the Tag enum; START and STOP are the two virtual tags
// appended after the real ones in the transition matrix.
inline constexpr int kStartTag = kNumTags;
inline constexpr int kStopTag = kNumTags + 1;

struct TaggerHyperparams {
  int d_t = 32;
  double lr = 0.01;
  int epochs = 10;
  int batch = 32;
  double clip = 5.0;
  int max_len = 256;
  int overlap = 16;
  std::string optimizer = "adam";
  double init_scale = 0.1;
};

// A [start, start+length) slice of a sequence.
struct Segment {
  int start = 0;
  int length = 0;

  bool operator==(const Segment&) const = default;
};

// Cuts a long sequence into pieces of at most `max_len`, preferring cuts
// right after phrase-boundary glyphs and falling back to fixed windows that
// overlap by `overlap` characters.
std::vector<Segment> TrainingSegments(std::u32string_view chars, int max_len, int overlap,
                                      const MarkerGlyphs& glyphs = DefaultGlyphs());

// Fixed windows of `max_len` with stride max_len - overlap covering [0, n).
std::vector<Segment> PredictionWindows(int n, int max_len, int overlap);

// Merges spans decoded per window (given in sequence coordinates). A span
// touching a window edge that is not a sequence edge is dropped; among
// overlapping survivors the one farthest from its window's edges wins.
std::vector<EntitySpan> StitchWindowSpans(const std::vector<Segment>& windows,
                                          const std::vector<std::vector<EntitySpan>>& spans,
                                          int n);

// Bidirectional LSTM over provider features, linear emission layer, and a
// linear-chain CRF on top. Provider features are frozen.
class CrfTagger {
 public:
  CrfTagger() = default;

  static CrfTagger Initialize(ProviderPtr provider, const TaggerHyperparams& hp, uint64_t seed);

  const EmbeddingProvider& provider() const { return *provider_; }
  const ProviderPtr& provider_ptr() const { return provider_; }
  const TaggerHyperparams& hyperparams() const { return hp_; }
  const Eigen::MatrixXd& transitions() const { return transitions_; }

  // n x kNumTags emission scores for provider features (dimension x n).
  Eigen::MatrixXd Emissions(const Eigen::MatrixXd& features) const;

  // Mean CRF negative log-likelihood over a batch of sequences. Gradients
  // are accumulated in NamedParameters order when `grads` is non-null.
  double BatchLoss(const std::vector<const Eigen::MatrixXd*>& features,
                   const std::vector<std::vector<int>>& gold, GradientList* grads) const;

  std::vector<EntitySpan> PredictFromFeatures(const Eigen::MatrixXd& features) const;
  std::vector<EntitySpan> PredictSpans(std::u32string_view text) const;

  ParameterList NamedParameters();

  // Full checkpoint: provider sections followed by a "TAGGER" section.
  std::string Encode() const;
  static CrfTagger Decode(std::string_view bytes);

 private:
  ProviderPtr provider_;
  TaggerHyperparams hp_;
  LstmLayer forward_;
  LstmLayer backward_;
  Eigen::MatrixXd proj_w_;       // kNumTags x 2*d_t
  Eigen::MatrixXd proj_b_;       // kNumTags x 1
  Eigen::MatrixXd transitions_;  // (kNumTags+2) x (kNumTags+2)
};

inline constexpr std::string_view kTaggerSection = "TAGGER";

// Viterbi decoding of the paragraph text followed by span recovery. Empty
// text yields no spans.
std::vector<EntitySpan> Predict(const CrfTagger& model, const AnnotatedParagraph& p);

struct TrainedTagger {
  CrfTagger model;
  TrainingLog log;
};

// Minimizes the mean CRF loss with minibatches; logs dev micro-F1 per epoch
// and returns the parameters of the best dev epoch (the initial model when
// epochs is 0). Deterministic for a given seed.
TrainedTagger TrainTagger(const std::vector<TaggedSequence>& train,
                          const std::vector<TaggedSequence>& dev, ProviderPtr provider,
                          const TaggerHyperparams& hp, uint64_t seed);

}  // namespace chrononer

#endif  // CHRONONER_TAGGER_TAGGER_H_
