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

#ifndef CHRONONER_CORPUS_TYPES_H_
#define CHRONONER_CORPUS_TYPES_H_

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chrononer {

enum class EntityLabel : uint8_t { kPerson = 0, kLocation = 1, kBook = 2 };
inline constexpr std::array<EntityLabel, 3> kEntityLabels = {
    EntityLabel::kPerson, EntityLabel::kLocation, EntityLabel::kBook};

enum class MarkerKind : uint8_t {
  kPhraseBoundary = 0,
  kKingSpace = 1,
  kOmissionNote = 2,
  kComparativeNote = 3,
  kLinkingNote = 4,
};
inline constexpr int kNumMarkerKinds = 5;

enum class CorpusStyle : uint8_t { kMarked = 0, kUnmarked = 1 };

// Which partition of its time period a paragraph was assigned to.
enum class Split : uint8_t { kNone = 0, kTrain = 1, kDev = 2, kTest = 3 };

// Offsets are in Unicode scalar values; `end` is exclusive.
struct EntitySpan {
  int start = 0;
  int end = 0;
  EntityLabel label = EntityLabel::kPerson;

  auto operator<=>(const EntitySpan&) const = default;
};

// Zero-width spans mark a boundary between two characters.
struct MarkerSpan {
  int start = 0;
  int end = 0;
  MarkerKind kind = MarkerKind::kPhraseBoundary;

  auto operator<=>(const MarkerSpan&) const = default;
};

struct AnnotatedParagraph {
  std::string id;
  std::string reign;
  int year = 0;
  std::u32string text;
  std::vector<EntitySpan> entities;
  std::vector<MarkerSpan> markers;
  Split split = Split::kNone;

  bool operator==(const AnnotatedParagraph&) const = default;
};

struct CorpusVariant {
  CorpusStyle style = CorpusStyle::kUnmarked;
  std::vector<AnnotatedParagraph> paragraphs;
};

struct CorpusStats {
  int64_t paragraph_count = 0;
  int64_t char_count = 0;
  int64_t distinct_chars = 0;
  double mean_paragraph_length = 0.0;
  std::map<EntityLabel, int64_t> entity_counts;
};

std::string_view LabelName(EntityLabel label);
std::optional<EntityLabel> ParseLabel(std::string_view name);
// Short tag suffix used in BIO tags: PER, LOC, BOOK.
std::string_view LabelTagSuffix(EntityLabel label);

std::string_view MarkerKindName(MarkerKind kind);
std::optional<MarkerKind> ParseMarkerKind(std::string_view name);

std::string_view StyleName(CorpusStyle style);
std::optional<CorpusStyle> ParseStyle(std::string_view name);

std::string_view SplitName(Split split);
std::optional<Split> ParseSplit(std::string_view name);

}  // namespace chrononer

#endif  // CHRONONER_CORPUS_TYPES_H_
