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

#include "embeddings/vocabulary.h"

#include <algorithm>
#include <map>

#include "common/error.h"

namespace chrononer {

Vocabulary Vocabulary::Build(const std::vector<std::u32string>& texts, int min_count) {
  if (texts.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  std::map<char32_t, long long> freq;
  for (const auto& t : texts) {
    for (char32_t c : t) ++freq[c];
  }
  std::vector<std::pair<char32_t, long long>> entries;
  for (const auto& [c, n] : freq) {
    if (n >= min_count) entries.emplace_back(c, n);
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary v;
  for (const auto& [c, n] : entries) {
    v.ids_[c] = kNumReserved + static_cast<int>(v.chars_.size());
    v.chars_.push_back(c);
  }
  return v;
}

int Vocabulary::Id(char32_t c) const {
  auto it = ids_.find(c);
  return it == ids_.end() ? kUnk : it->second;
}

char32_t Vocabulary::Char(int id) const {
  if (id < kNumReserved || id >= size()) return 0;
  return chars_[id - kNumReserved];
}

std::vector<int> Vocabulary::Encode(std::u32string_view text) const {
  std::vector<int> ids;
  ids.reserve(text.size());
  for (char32_t c : text) ids.push_back(Id(c));
  return ids;
}

void Vocabulary::Serialize(PayloadWriter& w) const {
  w.U32(static_cast<uint32_t>(chars_.size()));
  for (char32_t c : chars_) w.U32(static_cast<uint32_t>(c));
}

Vocabulary Vocabulary::Deserialize(PayloadReader& r) {
  Vocabulary v;
  const uint32_t n = r.U32();
  for (uint32_t i = 0; i < n; ++i) {
    const auto c = static_cast<char32_t>(r.U32());
    if (!v.ids_.emplace(c, kNumReserved + static_cast<int>(i)).second) {
      throw DataError("checkpoint vocabulary repeats a character");
    }
    v.chars_.push_back(c);
  }
  return v;
}

}  // namespace chrononer
