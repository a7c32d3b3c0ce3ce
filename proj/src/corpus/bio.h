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

#ifndef CHRONONER_CORPUS_BIO_H_
#define CHRONONER_CORPUS_BIO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corpus/types.h"

namespace chrononer {

// Character-level BIO tags. The numeric order is the tag index used by the
// tagger: O, then B/I pairs for PERSON, LOCATION and BOOK.
enum class Tag : uint8_t {
  kO = 0,
  kBPer = 1,
  kIPer = 2,
  kBLoc = 3,
  kILoc = 4,
  kBBook = 5,
  kIBook = 6,
};
inline constexpr int kNumTags = 7;

std::string_view TagName(Tag tag);
std::optional<Tag> ParseTag(std::string_view name);

inline Tag BeginTag(EntityLabel label) {
  return static_cast<Tag>(1 + 2 * static_cast<int>(label));
}
inline Tag InsideTag(EntityLabel label) {
  return static_cast<Tag>(2 + 2 * static_cast<int>(label));
}
// Label carried by a B- or I- tag; nullopt for O.
std::optional<EntityLabel> TagLabel(Tag tag);
inline bool IsBegin(Tag tag) { return tag != Tag::kO && (static_cast<int>(tag) % 2) == 1; }

struct TaggedSequence {
  std::u32string chars;
  std::vector<Tag> tags;

  bool operator==(const TaggedSequence&) const = default;
};

// B-X at each entity start, I-X inside, O elsewhere.
TaggedSequence ToBio(const AnnotatedParagraph& p);

// Recovers maximal spans. An I-X that does not continue a B-X/I-X run is
// read as the start of a new X span.
std::vector<EntitySpan> SpansFromBio(const std::vector<Tag>& tags);
inline std::vector<EntitySpan> SpansFromBio(const TaggedSequence& t) {
  return SpansFromBio(t.tags);
}

// True when every I-X follows B-X or I-X.
bool IsValidBio(const std::vector<Tag>& tags);

}  // namespace chrononer

#endif  // CHRONONER_CORPUS_BIO_H_
