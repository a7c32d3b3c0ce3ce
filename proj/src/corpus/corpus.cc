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

#include "corpus/corpus.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "common/error.h"
#include "common/random.h"
#include "common/utf8.h"
#include "json.hpp"

namespace chrononer {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::array<std::string_view, 3> kLabelNames = {"PERSON", "LOCATION", "BOOK"};
constexpr std::array<std::string_view, 3> kLabelSuffixes = {"PER", "LOC", "BOOK"};
constexpr std::array<std::string_view, kNumMarkerKinds> kMarkerNames = {
    "PHRASE_BOUNDARY", "KING_SPACE", "OMISSION_NOTE", "COMPARATIVE_NOTE", "LINKING_NOTE"};
constexpr std::array<std::string_view, 2> kStyleNames = {"marked", "unmarked"};
constexpr std::array<std::string_view, 4> kSplitNames = {"none", "train", "dev", "test"};

std::string Where(const AnnotatedParagraph& p) { return "record '" + p.id + "'"; }

// Entity list as [[start,end,label],...].
ordered_json SpansToJson(const std::vector<EntitySpan>& spans) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : spans) arr.push_back({e.start, e.end, LabelName(e.label)});
  return arr;
}

AnnotatedParagraph ParseRecord(const ordered_json& j) {
  if (!j.is_object()) throw DataError("record is not a JSON object");
  AnnotatedParagraph p;
  auto need = [&](const char* key) -> const ordered_json& {
    auto it = j.find(key);
    if (it == j.end()) throw DataError(std::string("missing field '") + key + "'");
    return *it;
  };
  const auto& id = need("id");
  if (!id.is_string()) throw DataError("field 'id' must be a string");
  p.id = id.get<std::string>();
  try {
    const auto& reign = need("reign");
    const auto& year = need("year");
    const auto& text = need("text");
    if (!reign.is_string()) throw DataError("field 'reign' must be a string");
    if (!year.is_number_integer()) throw DataError("field 'year' must be an integer");
    if (!text.is_string()) throw DataError("field 'text' must be a string");
    p.reign = reign.get<std::string>();
    p.year = year.get<int>();
    p.text = DecodeUtf8(text.get<std::string>());
    auto read_triples = [&](const char* key, auto&& emit) {
      auto it = j.find(key);
      if (it == j.end()) return;
      if (!it->is_array()) throw DataError(std::string("field '") + key + "' must be an array");
      for (const auto& t : *it) {
        if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() ||
            !t[1].is_number_integer() || !t[2].is_string()) {
          throw DataError(std::string("field '") + key + "' entries must be [start,end,name]");
        }
        emit(t[0].get<int>(), t[1].get<int>(), t[2].get<std::string>());
      }
    };
    read_triples("entities", [&](int s, int e, const std::string& name) {
      auto label = ParseLabel(name);
      if (!label) throw DataError("unknown entity label '" + name + "'");
      p.entities.push_back({s, e, *label});
    });
    read_triples("markers", [&](int s, int e, const std::string& name) {
      auto kind = ParseMarkerKind(name);
      if (!kind) throw DataError("unknown marker kind '" + name + "'");
      p.markers.push_back({s, e, *kind});
    });
    if (auto it = j.find("split"); it != j.end()) {
      auto split = it->is_string() ? ParseSplit(it->get<std::string>()) : std::nullopt;
      if (!split) throw DataError("field 'split' must be one of none/train/dev/test");
      p.split = *split;
    }
  } catch (const DataError& e) {
    throw DataError(Where(p) + ": " + e.what());
  }
  ValidateParagraph(p);
  return p;
}

// Prefix count of kept characters: new offset of old position i.
std::vector<int> KeptPrefix(const std::vector<bool>& removed) {
  std::vector<int> prefix(removed.size() + 1, 0);
  for (size_t i = 0; i < removed.size(); ++i) prefix[i + 1] = prefix[i] + (removed[i] ? 0 : 1);
  return prefix;
}

}  // namespace

std::string_view LabelName(EntityLabel label) { return kLabelNames[static_cast<int>(label)]; }
std::string_view LabelTagSuffix(EntityLabel label) {
  return kLabelSuffixes[static_cast<int>(label)];
}

std::optional<EntityLabel> ParseLabel(std::string_view name) {
  for (int i = 0; i < 3; ++i) {
    if (kLabelNames[i] == name) return static_cast<EntityLabel>(i);
  }
  return std::nullopt;
}

std::string_view MarkerKindName(MarkerKind kind) { return kMarkerNames[static_cast<int>(kind)]; }

std::optional<MarkerKind> ParseMarkerKind(std::string_view name) {
  for (int i = 0; i < kNumMarkerKinds; ++i) {
    if (kMarkerNames[i] == name) return static_cast<MarkerKind>(i);
  }
  return std::nullopt;
}

std::string_view StyleName(CorpusStyle style) { return kStyleNames[static_cast<int>(style)]; }

std::optional<CorpusStyle> ParseStyle(std::string_view name) {
  for (int i = 0; i < 2; ++i) {
    if (kStyleNames[i] == name) return static_cast<CorpusStyle>(i);
  }
  return std::nullopt;
}

std::string_view SplitName(Split split) { return kSplitNames[static_cast<int>(split)]; }

std::optional<Split> ParseSplit(std::string_view name) {
  for (int i = 0; i < 4; ++i) {
    if (kSplitNames[i] == name) return static_cast<Split>(i);
  }
  return std::nullopt;
}

bool MarkerGlyphs::IsGlyph(char32_t c) const { return KindOf(c).has_value(); }

std::optional<MarkerKind> MarkerGlyphs::KindOf(char32_t c) const {
  if (c == 0) return std::nullopt;
  for (int i = 0; i < kNumMarkerKinds; ++i) {
    if (glyph[i] == c) return static_cast<MarkerKind>(i);
  }
  return std::nullopt;
}

const MarkerGlyphs& DefaultGlyphs() {
  static const MarkerGlyphs kGlyphs;
  return kGlyphs;
}

void ValidateParagraph(const AnnotatedParagraph& p) {
  const int n = static_cast<int>(p.text.size());
  for (const auto& e : p.entities) {
    if (e.start < 0 || e.end > n || e.start >= e.end) {
      throw DataError(Where(p) + ": entity span [" + std::to_string(e.start) + "," +
                      std::to_string(e.end) + ") out of bounds for text length " +
                      std::to_string(n));
    }
  }
  for (const auto& m : p.markers) {
    if (m.start < 0 || m.end > n || m.start > m.end) {
      throw DataError(Where(p) + ": marker span [" + std::to_string(m.start) + "," +
                      std::to_string(m.end) + ") out of bounds for text length " +
                      std::to_string(n));
    }
  }
  std::vector<EntitySpan> sorted = p.entities;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].start < sorted[i - 1].end) {
      throw DataError(Where(p) + ": overlapping entity spans at offset " +
                      std::to_string(sorted[i].start));
    }
  }
}

std::vector<AnnotatedParagraph> ParseCorpus(std::istream& in) {
  std::vector<AnnotatedParagraph> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    try {
      out.push_back(ParseRecord(j));
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<AnnotatedParagraph> ParseCorpusFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  try {
    return ParseCorpus(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string SerializeParagraph(const AnnotatedParagraph& p,
                               const std::vector<EntitySpan>* predicted) {
  ordered_json j;
  j["id"] = p.id;
  j["reign"] = p.reign;
  j["year"] = p.year;
  j["text"] = EncodeUtf8(p.text);
  j["entities"] = SpansToJson(p.entities);
  ordered_json markers = ordered_json::array();
  for (const auto& m : p.markers) markers.push_back({m.start, m.end, MarkerKindName(m.kind)});
  j["markers"] = std::move(markers);
  if (p.split != Split::kNone) j["split"] = SplitName(p.split);
  if (predicted != nullptr) j["predicted_entities"] = SpansToJson(*predicted);
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

void WriteCorpus(std::ostream& out, const std::vector<AnnotatedParagraph>& corpus) {
  for (const auto& p : corpus) out << SerializeParagraph(p) << '\n';
}

void WriteCorpusFile(const std::filesystem::path& path,
                     const std::vector<AnnotatedParagraph>& corpus) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  WriteCorpus(out, corpus);
  if (!out) throw DataError("write failed for " + path.string());
}

AnnotatedParagraph StripMarkers(const AnnotatedParagraph& p, const MarkerGlyphs& glyphs) {
  std::vector<bool> removed(p.text.size());
  bool any = false;
  for (size_t i = 0; i < p.text.size(); ++i) {
    removed[i] = glyphs.IsGlyph(p.text[i]);
    any = any || removed[i];
  }
  AnnotatedParagraph out = p;
  out.markers.clear();
  if (!any) return out;
  const auto prefix = KeptPrefix(removed);
  out.text.clear();
  for (size_t i = 0; i < p.text.size(); ++i) {
    if (!removed[i]) out.text.push_back(p.text[i]);
  }
  for (auto& e : out.entities) {
    if (prefix[e.end] - prefix[e.start] != e.end - e.start) {
      throw DataError(Where(p) + ": entity [" + std::to_string(e.start) + "," +
                      std::to_string(e.end) + ") contains a marker glyph");
    }
    e.start = prefix[e.start];
    e.end = prefix[e.end];
  }
  return out;
}

AnnotatedParagraph AddMarkerView(const AnnotatedParagraph& p, const MarkerGlyphs& glyphs) {
  if (p.markers.empty()) return p;
  for (char32_t c : p.text) {
    if (glyphs.IsGlyph(c)) {
      throw DataError(Where(p) + ": text already carries inline marker glyphs");
    }
  }
  std::vector<size_t> order(p.markers.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return p.markers[a].start < p.markers[b].start;
  });
  for (const auto& m : p.markers) {
    if (glyphs.For(m.kind) == 0) {
      throw DataError(Where(p) + ": marker kind " + std::string(MarkerKindName(m.kind)) +
                      " has no assigned glyph");
    }
  }
  for (const auto& e : p.entities) {
    for (const auto& m : p.markers) {
      if (m.start > e.start && m.start < e.end) {
        throw DataError(Where(p) + ": marker at offset " + std::to_string(m.start) +
                        " falls inside entity [" + std::to_string(e.start) + "," +
                        std::to_string(e.end) + ")");
      }
    }
  }

  AnnotatedParagraph out = p;
  out.text.clear();
  out.markers.clear();
  // shift[i] = number of glyphs inserted at or before position i.
  const int n = static_cast<int>(p.text.size());
  std::vector<int> shift(n + 1, 0);
  size_t k = 0;
  for (int i = 0; i <= n; ++i) {
    while (k < order.size() && p.markers[order[k]].start == i) {
      const auto& m = p.markers[order[k]];
      out.markers.push_back({static_cast<int>(out.text.size()),
                             static_cast<int>(out.text.size()) + 1, m.kind});
      out.text.push_back(glyphs.For(m.kind));
      ++k;
    }
    shift[i] = static_cast<int>(out.text.size()) - i;
    if (i < n) out.text.push_back(p.text[i]);
  }
  for (auto& e : out.entities) {
    const int len = e.end - e.start;
    e.start += shift[e.start];
    e.end = e.start + len;
  }
  return out;
}

AnnotatedParagraph ToStandoff(const AnnotatedParagraph& p, const MarkerGlyphs& glyphs) {
  bool any = false;
  for (char32_t c : p.text) any = any || glyphs.IsGlyph(c);
  if (!any) return p;
  for (const auto& m : p.markers) {
    if (m.end != m.start + 1 || glyphs.For(m.kind) != p.text[m.start]) {
      throw DataError(Where(p) + ": marker [" + std::to_string(m.start) + "," +
                      std::to_string(m.end) +
                      ") does not cover its glyph in a paragraph with inline markers");
    }
  }
  AnnotatedParagraph out = StripMarkers(p, glyphs);
  int kept = 0;
  for (char32_t c : p.text) {
    if (auto kind = glyphs.KindOf(c)) {
      out.markers.push_back({kept, kept, *kind});
    } else {
      ++kept;
    }
  }
  return out;
}

CorpusVariant MakeVariant(const std::vector<AnnotatedParagraph>& standoff, CorpusStyle style,
                          const MarkerGlyphs& glyphs) {
  CorpusVariant v;
  v.style = style;
  v.paragraphs.reserve(standoff.size());
  for (const auto& p : standoff) {
    v.paragraphs.push_back(style == CorpusStyle::kMarked ? AddMarkerView(p, glyphs)
                                                         : StripMarkers(p, glyphs));
  }
  return v;
}

TemporalSplit SplitTemporal(const std::vector<AnnotatedParagraph>& corpus,
                            const std::set<std::string>& past_reigns,
                            const std::set<std::string>& future_reigns, uint64_t seed,
                            const SplitRatios& ratios) {
  for (const auto& r : past_reigns) {
    if (future_reigns.count(r)) {
      throw ConfigError("reign '" + r + "' is listed as both past and future");
    }
  }
  if (ratios.train < 0 || ratios.dev < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.dev + ratios.test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must be non-negative and sum to 1");
  }
  TemporalSplit out;
  for (const auto& p : corpus) {
    if (past_reigns.count(p.reign)) {
      out.past.push_back(p);
    } else if (future_reigns.count(p.reign)) {
      out.future.push_back(p);
    }
  }
  if (out.past.empty()) throw DataError("no paragraphs belong to the past reigns");
  if (out.future.empty()) throw DataError("no paragraphs belong to the future reigns");

  auto assign = [&](std::vector<AnnotatedParagraph>& side, std::string_view tag) {
    const size_t n = side.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(DeriveSeed(seed, tag));
    rng.Shuffle(order);
    const auto n_train = static_cast<size_t>(std::llround(ratios.train * static_cast<double>(n)));
    const auto n_dev = std::min(
        n - std::min(n, n_train),
        static_cast<size_t>(std::llround(ratios.dev * static_cast<double>(n))));
    for (size_t r = 0; r < n; ++r) {
      Split s = r < n_train ? Split::kTrain : (r < n_train + n_dev ? Split::kDev : Split::kTest);
      side[order[r]].split = s;
    }
  };
  assign(out.past, "split/past");
  assign(out.future, "split/future");
  return out;
}

std::vector<AnnotatedParagraph> SelectSplit(const std::vector<AnnotatedParagraph>& paragraphs,
                                            Split split) {
  std::vector<AnnotatedParagraph> out;
  for (const auto& p : paragraphs) {
    if (p.split == split) out.push_back(p);
  }
  return out;
}

CorpusStats ComputeCorpusStats(const std::vector<AnnotatedParagraph>& corpus) {
  if (corpus.empty()) throw DataError("cannot compute statistics of an empty corpus");
  CorpusStats s;
  for (auto label : kEntityLabels) s.entity_counts[label] = 0;
  std::unordered_set<char32_t> distinct;
  for (const auto& p : corpus) {
    ++s.paragraph_count;
    s.char_count += static_cast<int64_t>(p.text.size());
    distinct.insert(p.text.begin(), p.text.end());
    for (const auto& e : p.entities) ++s.entity_counts[e.label];
  }
  s.distinct_chars = static_cast<int64_t>(distinct.size());
  s.mean_paragraph_length =
      static_cast<double>(s.char_count) / static_cast<double>(s.paragraph_count);
  return s;
}

std::map<std::string, CorpusStats> StatsByReign(const std::vector<AnnotatedParagraph>& corpus) {
  std::map<std::string, std::vector<AnnotatedParagraph>> by_reign;
  for (const auto& p : corpus) by_reign[p.reign].push_back(p);
  std::map<std::string, CorpusStats> out;
  for (const auto& [reign, paragraphs] : by_reign) out[reign] = ComputeCorpusStats(paragraphs);
  return out;
}

}  // namespace chrononer
