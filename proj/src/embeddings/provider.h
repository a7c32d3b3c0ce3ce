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

#ifndef CHRONONER_EMBEDDINGS_PROVIDER_H_
#define CHRONONER_EMBEDDINGS_PROVIDER_H_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "common/checkpoint.h"
#include "embeddings/char_lm.h"
#include "embeddings/vocabulary.h"

namespace chrononer {

// Per-character feature source for the tagger. Implementations are
// immutable after construction and safe to share across threads.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual int dimension() const = 0;
  // dimension() x text.size(), all entries finite.
  virtual Eigen::MatrixXd Embed(std::u32string_view text) const = 0;
  // "charlm" or "static".
  virtual std::string kind() const = 0;
  virtual std::vector<CheckpointSection> Sections() const = 0;
};

using ProviderPtr = std::shared_ptr<const EmbeddingProvider>;

// Column i concatenates the forward state after text[0..i] and the backward
// state after text[i..]. The two models must share a vocabulary.
Eigen::MatrixXd ContextualEmbed(const CharLanguageModel& forward,
                                const CharLanguageModel& backward, std::u32string_view text);

// Position-independent lookup; characters outside `vocab` use the UNK column.
Eigen::MatrixXd StaticEmbed(const Vocabulary& vocab, const Eigen::MatrixXd& table,
                            std::u32string_view text);

class ContextualLmProvider : public EmbeddingProvider {
 public:
  ContextualLmProvider(CharLanguageModel forward, CharLanguageModel backward);

  int dimension() const override { return forward_.hidden_size() + backward_.hidden_size(); }
  Eigen::MatrixXd Embed(std::u32string_view text) const override {
    return ContextualEmbed(forward_, backward_, text);
  }
  std::string kind() const override { return "charlm"; }
  std::vector<CheckpointSection> Sections() const override;

  const CharLanguageModel& forward() const { return forward_; }
  const CharLanguageModel& backward() const { return backward_; }

 private:
  CharLanguageModel forward_;
  CharLanguageModel backward_;
};

class StaticLookupProvider : public EmbeddingProvider {
 public:
  // `table` has one column per vocabulary id.
  StaticLookupProvider(Vocabulary vocab, Eigen::MatrixXd table);

  int dimension() const override { return static_cast<int>(table_.rows()); }
  Eigen::MatrixXd Embed(std::u32string_view text) const override {
    return StaticEmbed(vocab_, table_, text);
  }
  std::string kind() const override { return "static"; }
  std::vector<CheckpointSection> Sections() const override;

 private:
  Vocabulary vocab_;
  Eigen::MatrixXd table_;
};

// Section tags used in checkpoints.
inline constexpr std::string_view kCharLmSection = "CHARLM";
inline constexpr std::string_view kStaticSection = "STATIC";

std::string EncodeLanguageModel(const CharLanguageModel& lm);
CharLanguageModel DecodeLanguageModel(std::string_view checkpoint_bytes);

// Rebuilds a provider from the sections that precede a tagger section.
ProviderPtr ProviderFromSections(const std::vector<CheckpointSection>& sections);

// Builds a provider by name from pretrained language models: "charlm" uses
// both models, "static" uses the forward model's input embedding table.
ProviderPtr MakeProvider(std::string_view name, const CharLanguageModel& forward,
                         const CharLanguageModel& backward);

}  // namespace chrononer

#endif  // CHRONONER_EMBEDDINGS_PROVIDER_H_
