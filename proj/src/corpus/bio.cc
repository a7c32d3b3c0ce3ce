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

#include "corpus/bio.h"

#include <array>

#include "common/error.h"

namespace chrononer {
namespace {

constexpr std::array<std::string_view, kNumTags> kTagNames = {
    "O", "B-PER", "I-PER", "B-LOC", "I-LOC", "B-BOOK", "I-BOOK"};

}  // namespace

std::string_view TagName(Tag tag) { return kTagNames[static_cast<int>(tag)]; }

std::optional<Tag> ParseTag(std::string_view name) {
  for (int i = 0; i < kNumTags; ++i) {
    if (kTagNames[i] == name) return static_cast<Tag>(i);
  }
  return std::nullopt;
}

std::optional<EntityLabel> TagLabel(Tag tag) {
  if (tag == Tag::kO) return std::nullopt;
  return static_cast<EntityLabel>((static_cast<int>(tag) - 1) / 2);
}

TaggedSequence ToBio(const AnnotatedParagraph& p) {
  TaggedSequence out;
  out.chars = p.text;
  out.tags.assign(p.text.size(), Tag::kO);
  const int n = static_cast<int>(p.text.size());
  for (const auto& e : p.entities) {
    if (e.start < 0 || e.end > n || e.start >= e.end) {
      throw DataError("record '" + p.id + "': entity span out of bounds");
    }
    out.tags[e.start] = BeginTag(e.label);
    for (int i = e.start + 1; i < e.end; ++i) out.tags[i] = InsideTag(e.label);
  }
  return out;
}

std::vector<EntitySpan> SpansFromBio(const std::vector<Tag>& tags) {
  std::vector<EntitySpan> spans;
  const int n = static_cast<int>(tags.size());
  int i = 0;
  while (i < n) {
    const auto label = TagLabel(tags[i]);
    if (!label) {
      ++i;
      continue;
    }
    // Either a B-X or an orphan I-X: both open a span.
    int j = i + 1;
    while (j < n && tags[j] == InsideTag(*label)) ++j;
    spans.push_back({i, j, *label});
    i = j;
  }
  return spans;
}

bool IsValidBio(const std::vector<Tag>& tags) {
  Tag prev = Tag::kO;
  for (Tag t : tags) {
    if (t != Tag::kO && !IsBegin(t)) {
      const auto label = TagLabel(t);
      if (prev != BeginTag(*label) && prev != InsideTag(*label)) return false;
    }
    prev = t;
  }
  return true;
}

}  // namespace chrononer
