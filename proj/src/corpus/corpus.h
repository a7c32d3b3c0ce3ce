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

#ifndef CHRONONER_CORPUS_CORPUS_H_
#define CHRONONER_CORPUS_CORPUS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "corpus/types.h"

namespace chrononer {

// Inline rendering of each marker kind. A zero entry means the kind has no
// glyph and cannot be rendered.
struct MarkerGlyphs {
  std::array<char32_t, kNumMarkerKinds> glyph = {
      U'。',  // PHRASE_BOUNDARY
      U' ',       // KING_SPACE
      U'〔',  // OMISSION_NOTE
      U'〈',  // COMPARATIVE_NOTE
      U'〖',  // LINKING_NOTE
  };

  char32_t For(MarkerKind kind) const { return glyph[static_cast<int>(kind)]; }
  bool IsGlyph(char32_t c) const;
  std::optional<MarkerKind> KindOf(char32_t c) const;
};

const MarkerGlyphs& DefaultGlyphs();

// Throws DataError naming the record if any invariant is violated: spans in
// bounds, entities non-empty and non-overlapping.
void ValidateParagraph(const AnnotatedParagraph& p);

// Reads UTF-8 JSON Lines. Blank lines are skipped. Errors carry the 1-based
// line number and, once known, the record id.
std::vector<AnnotatedParagraph> ParseCorpus(std::istream& in);
std::vector<AnnotatedParagraph> ParseCorpusFile(const std::filesystem::path& path);

// One JSON object per paragraph, keys in canonical order, no trailing
// newline. `predicted` adds a "predicted_entities" field.
std::string SerializeParagraph(const AnnotatedParagraph& p,
                               const std::vector<EntitySpan>* predicted = nullptr);
void WriteCorpus(std::ostream& out, const std::vector<AnnotatedParagraph>& corpus);
void WriteCorpusFile(const std::filesystem::path& path,
                     const std::vector<AnnotatedParagraph>& corpus);

// Removes every marker glyph from the text and clears the marker list.
// Entity spans are shifted so their surface text is unchanged; an entity
// that contains a glyph is reported as corrupt annotation.
AnnotatedParagraph StripMarkers(const AnnotatedParagraph& p,
                                const MarkerGlyphs& glyphs = DefaultGlyphs());

// Renders standoff markers inline: each marker's glyph is inserted before
// the character at the marker's start offset. In the result every marker
// covers exactly its own glyph.
AnnotatedParagraph AddMarkerView(const AnnotatedParagraph& p,
                                 const MarkerGlyphs& glyphs = DefaultGlyphs());

// Converts a paragraph with inline glyphs back into standoff form (glyph
// free text, zero-width markers). Paragraphs without glyphs are returned
// unchanged.
AnnotatedParagraph ToStandoff(const AnnotatedParagraph& p,
                              const MarkerGlyphs& glyphs = DefaultGlyphs());

CorpusVariant MakeVariant(const std::vector<AnnotatedParagraph>& standoff, CorpusStyle style,
                          const MarkerGlyphs& glyphs = DefaultGlyphs());

struct SplitRatios {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
};

struct TemporalSplit {
  std::vector<AnnotatedParagraph> past;
  std::vector<AnnotatedParagraph> future;
};

// Partitions by reign, then shuffles each side with a seed-derived stream
// and tags paragraphs train/dev/test. Within a side, output keeps the input
// order; only the split tags depend on the shuffle.
TemporalSplit SplitTemporal(const std::vector<AnnotatedParagraph>& corpus,
                            const std::set<std::string>& past_reigns,
                            const std::set<std::string>& future_reigns, uint64_t seed,
                            const SplitRatios& ratios = {});

std::vector<AnnotatedParagraph> SelectSplit(const std::vector<AnnotatedParagraph>& paragraphs,
                                            Split split);

CorpusStats ComputeCorpusStats(const std::vector<AnnotatedParagraph>& corpus);

// Stats per reign, keyed by reign label.
std::map<std::string, CorpusStats> StatsByReign(const std::vector<AnnotatedParagraph>& corpus);

}  // namespace chrononer

#endif  // CHRONONER_CORPUS_CORPUS_H_
