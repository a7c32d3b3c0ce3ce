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

#ifndef CHRONONER_EVALUATION_SCORING_H_
#define CHRONONER_EVALUATION_SCORING_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "corpus/bio.h"
#include "corpus/types.h"

namespace chrononer {

struct PrfCounts {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;

  // Zero when the denominator is zero.
  double precision() const { return tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0; }
  double recall() const { return tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0; }
  double f1() const {
    const double p = precision(), r = recall();
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  }

  PrfCounts& operator+=(const PrfCounts& o) {
    tp += o.tp, fp += o.fp, fn += o.fn;
    return *this;
  }
  bool operator==(const PrfCounts&) const = default;
};

struct EvalResult {
  std::array<PrfCounts, 3> per_type;
  // Character-level tag accuracy; only known when tags were compared.
  std::optional<double> accuracy;
  // Digest of the checkpoint that produced the predictions, if any.
  std::string model_digest;

  const PrfCounts& of(EntityLabel label) const { return per_type[static_cast<int>(label)]; }
  PrfCounts micro() const {
    PrfCounts m;
    for (const auto& c : per_type) m += c;
    return m;
  }

  bool operator==(const EvalResult&) const = default;
};

// Exact-match span scoring. A prediction is a true positive when an unused
// gold span in the same document has the same start, end and label.
EvalResult ScoreSpans(const std::vector<std::vector<EntitySpan>>& gold,
                      const std::vector<std::vector<EntitySpan>>& predicted);
EvalResult ScoreSpans(const std::vector<EntitySpan>& gold,
                      const std::vector<EntitySpan>& predicted);

// Tags implied by a span list over a sequence of length n.
std::vector<Tag> TagsFromSpans(const std::vector<EntitySpan>& spans, int n);

}  // namespace chrononer

#endif  // CHRONONER_EVALUATION_SCORING_H_
