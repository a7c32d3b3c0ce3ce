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

#include "common/error.h"

namespace chrononer {

Eigen::MatrixXd ContextualEmbed(const CharLanguageModel& forward,
                                const CharLanguageModel& backward, std::u32string_view text) {
  if (!(forward.vocab() == backward.vocab())) {
    throw ConfigError("forward and backward language models use different vocabularies");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(text.size());
  Eigen::MatrixXd out(forward.hidden_size() + backward.hidden_size(), n);
  if (n == 0) return out;
  out.topRows(forward.hidden_size()) = forward.HiddenStates(text);
  out.bottomRows(backward.hidden_size()) = backward.HiddenStates(text);
  return out;
}

Eigen::MatrixXd StaticEmbed(const Vocabulary& vocab, const Eigen::MatrixXd& table,
                            std::u32string_view text) {
  Eigen::MatrixXd out(table.rows(), static_cast<Eigen::Index>(text.size()));
  for (size_t i = 0; i < text.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = table.col(vocab.Id(text[i]));
  }
  return out;
}

ContextualLmProvider::ContextualLmProvider(CharLanguageModel forward, CharLanguageModel backward)
    : forward_(std::move(forward)), backward_(std::move(backward)) {
  if (forward_.direction() != Direction::kForward ||
      backward_.direction() != Direction::kBackward) {
    throw ConfigError("contextual provider needs one forward and one backward model");
  }
  if (!(forward_.vocab() == backward_.vocab())) {
    throw ConfigError("forward and backward language models use different vocabularies");
  }
}

std::vector<CheckpointSection> ContextualLmProvider::Sections() const {
  PayloadWriter f, b;
  forward_.Serialize(f);
  backward_.Serialize(b);
  return {{std::string(kCharLmSection), f.bytes()}, {std::string(kCharLmSection), b.bytes()}};
}

StaticLookupProvider::StaticLookupProvider(Vocabulary vocab, Eigen::MatrixXd table)
    : vocab_(std::move(vocab)), table_(std::move(table)) {
  if (table_.cols() != vocab_.size()) {
    throw ConfigError("static embedding table does not cover the vocabulary");
  }
}

std::vector<CheckpointSection> StaticLookupProvider::Sections() const {
  PayloadWriter w;
  vocab_.Serialize(w);
  w.Tensor(table_);
  return {{std::string(kStaticSection), w.bytes()}};
}

std::string EncodeLanguageModel(const CharLanguageModel& lm) {
  PayloadWriter w;
  lm.Serialize(w);
  return EncodeCheckpoint({{std::string(kCharLmSection), w.bytes()}});
}

CharLanguageModel DecodeLanguageModel(std::string_view checkpoint_bytes) {
  const auto sections = DecodeCheckpoint(checkpoint_bytes);
  if (sections.size() != 1 || sections[0].tag != kCharLmSection) {
    throw DataError("checkpoint does not hold a single character language model");
  }
  PayloadReader r(sections[0].payload);
  auto lm = CharLanguageModel::Deserialize(r);
  if (!r.AtEnd()) throw DataError("trailing bytes in language model section");
  return lm;
}

ProviderPtr ProviderFromSections(const std::vector<CheckpointSection>& sections) {
  if (sections.size() == 2 && sections[0].tag == kCharLmSection &&
      sections[1].tag == kCharLmSection) {
    PayloadReader f(sections[0].payload), b(sections[1].payload);
    auto fwd = CharLanguageModel::Deserialize(f);
    auto bwd = CharLanguageModel::Deserialize(b);
    return std::make_shared<ContextualLmProvider>(std::move(fwd), std::move(bwd));
  }
  if (sections.size() == 1 && sections[0].tag == kStaticSection) {
    PayloadReader r(sections[0].payload);
    auto vocab = Vocabulary::Deserialize(r);
    auto table = r.Tensor();
    return std::make_shared<StaticLookupProvider>(std::move(vocab), std::move(table));
  }
  throw DataError("checkpoint does not describe a known embedding provider");
}

ProviderPtr MakeProvider(std::string_view name, const CharLanguageModel& forward,
                         const CharLanguageModel& backward) {
  if (name == "charlm") return std::make_shared<ContextualLmProvider>(forward, backward);
  if (name == "static") {
    return std::make_shared<StaticLookupProvider>(forward.vocab(), forward.embedding());
  }
  throw ConfigError("unknown model '" + std::string(name) + "' (expected charlm or static)");
}

}  // namespace chrononer
