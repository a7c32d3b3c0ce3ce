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

#include "evaluation/scoring.h"

#include <map>

#include "common/error.h"

namespace chrononer {

EvalResult ScoreSpans(const std::vector<std::vector<EntitySpan>>& gold,
                      const std::vector<std::vector<EntitySpan>>& predicted) {
  if (gold.size() != predicted.size()) {
    throw DataError("gold and predicted document counts differ");
  }
  EvalResult r;
  for (size_t d = 0; d < gold.size(); ++d) {
    std::map<EntitySpan, int> unused;
    for (const auto& g : gold[d]) ++unused[g];
    for (const auto& p : predicted[d]) {
      auto& c = r.per_type[static_cast<int>(p.label)];
      auto it = unused.find(p);
      if (it != unused.end() && it->second > 0) {
        --it->second;
        ++c.tp;
      } else {
        ++c.fp;
      }
    }
    for (const auto& [span, count] : unused) r.per_type[static_cast<int>(span.label)].fn += count;
  }
  return r;
}

EvalResult ScoreSpans(const std::vector<EntitySpan>& gold,
                      const std::vector<EntitySpan>& predicted) {
  return ScoreSpans(std::vector<std::vector<EntitySpan>>{gold},
                    std::vector<std::vector<EntitySpan>>{predicted});
}

std::vector<Tag> TagsFromSpans(const std::vector<EntitySpan>& spans, int n) {
  std::vector<Tag> tags(n, Tag::kO);
  for (const auto& s : spans) {
    if (s.start < 0 || s.end > n || s.start >= s.end) throw DataError("span out of bounds");
    tags[s.start] = BeginTag(s.label);
    for (int i = s.start + 1; i < s.end; ++i) tags[i] = InsideTag(s.label);
  }
  return tags;
}

}  // namespace chrononer
