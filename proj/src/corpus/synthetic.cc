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

#include "corpus/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "common/error.h"
#include "common/random.h"
#include "corpus/corpus.h"

namespace chrononer {
namespace {

constexpr char32_t kCjkBase = 0x4E00;

std::u32string RandomWord(Rng& rng, const std::u32string& pool, int min_len, int max_len) {
  std::u32string w;
  const int len = rng.Between(min_len, max_len);
  for (int i = 0; i < len; ++i) w.push_back(pool[rng.Below(pool.size())]);
  return w;
}

// Draws `count` distinct words not contained in `taken` and adds them to it.
std::vector<std::u32string> FreshWords(Rng& rng, const std::u32string& pool, int count,
                                       int min_len, int max_len,
                                       std::set<std::u32string>& taken) {
  std::vector<std::u32string> out;
  int attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > 1000 * (count + 1)) {
      throw ConfigError("synthetic name pool too small for the requested lexicon");
    }
    auto w = RandomWord(rng, pool, min_len, max_len);
    if (taken.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

constexpr std::array<std::pair<int, int>, 3> kNameLengths = {{{2, 3}, {2, 2}, {3, 4}}};

class ParagraphBuilder {
 public:
  ParagraphBuilder(const SynthConfig& config, Rng& rng) : config_(config), rng_(rng) {}

  void Filler(int min_len, int max_len) {
    const int len = rng_.Between(min_len, max_len);
    for (int i = 0; i < len; ++i) p_.text.push_back(config_.filler[rng_.Below(config_.filler.size())]);
  }

  void Marker(MarkerKind kind, int start, int end) { p_.markers.push_back({start, end, kind}); }
  int Pos() const { return static_cast<int>(p_.text.size()); }

  void Entity(EntityLabel label, const std::u32string& surface) {
    const int start = Pos();
    p_.text += surface;
    p_.entities.push_back({start, Pos(), label});
  }

  void Text(char32_t c) { p_.text.push_back(c); }

  AnnotatedParagraph Take() { return std::move(p_); }

 private:
  const SynthConfig& config_;
  Rng& rng_;
  AnnotatedParagraph p_;
};

EntityLabel DrawLabel(Rng& rng, const std::array<double, 3>& weights) {
  double total = weights[0] + weights[1] + weights[2];
  double u = rng.Uniform() * total;
  for (int i = 0; i < 2; ++i) {
    if (u < weights[i]) return static_cast<EntityLabel>(i);
    u -= weights[i];
  }
  return EntityLabel::kBook;
}

}  // namespace

SynthConfig DefaultSynthConfig(uint64_t seed, const SynthShape& shape) {
  if (shape.filler_size <= 0 || shape.name_pool_size <= 0 || shape.shared_chars < 0 ||
      shape.shared_chars > std::min(shape.filler_size, shape.name_pool_size)) {
    throw ConfigError("invalid synthetic alphabet shape");
  }
  SynthConfig c;
  for (int i = 0; i < shape.filler_size; ++i) c.filler.push_back(kCjkBase + i);
  const int name_base = shape.filler_size - shape.shared_chars;
  for (int i = 0; i < shape.name_pool_size; ++i) c.name_chars.push_back(kCjkBase + name_base + i);
  c.cues = {U"臣公", U"於至", U"書讀"};
  Rng rng(DeriveSeed(seed, "synth/lexicon"));
  std::set<std::u32string> taken;
  const std::array<int, 3> sizes = {shape.person_lexicon, shape.location_lexicon,
                                    shape.book_lexicon};
  for (int l = 0; l < 3; ++l) {
    c.lexicons[l] = FreshWords(rng, c.name_chars, sizes[l], kNameLengths[l].first,
                               kNameLengths[l].second, taken);
  }
  return c;
}

SynthLexicons BuildPeriodLexicons(const SynthConfig& config, uint64_t seed) {
  if (config.drift < 0.0 || config.drift > 1.0) throw ConfigError("drift must lie in [0, 1]");
  SynthLexicons out;
  out.past = config.lexicons;
  out.future = config.lexicons;
  if (config.drift == 0.0) return out;
  if (config.name_chars.empty()) throw ConfigError("drift requires a non-empty name pool");
  std::set<std::u32string> taken;
  for (const auto& lex : config.lexicons) taken.insert(lex.begin(), lex.end());
  Rng rng(DeriveSeed(seed, "synth/drift"));
  for (int l = 0; l < 3; ++l) {
    auto& lex = out.future[l];
    const int n = static_cast<int>(lex.size());
    const int replace = static_cast<int>(std::lround(config.drift * n));
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    rng.Shuffle(order);
    auto fresh = FreshWords(rng, config.name_chars, replace, kNameLengths[l].first,
                            kNameLengths[l].second, taken);
    for (int i = 0; i < replace; ++i) {
      lex[order[i]] = fresh[i];
      out.unseen.insert(fresh[i]);
    }
  }
  return out;
}

std::vector<AnnotatedParagraph> GenerateSynthetic(const SynthConfig& config, uint64_t seed,
                                                  SynthLedger* ledger) {
  if (config.past_paragraphs < 0 || config.future_paragraphs < 0) {
    throw ConfigError("paragraph counts must be non-negative");
  }
  if (config.min_length < 1 || config.max_length < config.min_length) {
    throw ConfigError("synthetic paragraph length bounds are inconsistent");
  }
  if (config.filler.empty()) throw ConfigError("synthetic filler alphabet is empty");
  for (int l = 0; l < 3; ++l) {
    if (config.label_weights[l] < 0) throw ConfigError("label weights must be non-negative");
    if (config.label_weights[l] > 0 && config.lexicons[l].empty()) {
      throw ConfigError("empty lexicon for requested label " +
                        std::string(LabelName(static_cast<EntityLabel>(l))));
    }
  }
  const double weight_sum =
      config.label_weights[0] + config.label_weights[1] + config.label_weights[2];
  const bool any_entities = weight_sum > 0 && config.entity_rate > 0;

  SynthLedger local;
  SynthLedger& book = ledger != nullptr ? *ledger : local;
  book = SynthLedger{};
  book.lexicons = BuildPeriodLexicons(config, seed);

  std::vector<AnnotatedParagraph> out;
  out.reserve(config.past_paragraphs + config.future_paragraphs);
  Rng rng(DeriveSeed(seed, "synth/text"));

  auto make = [&](bool future, int index) {
    const auto& lexicons = future ? book.lexicons.future : book.lexicons.past;
    ParagraphBuilder b(config, rng);
    const int target = rng.Between(config.min_length, config.max_length);
    while (b.Pos() < target) {
      if (rng.Bernoulli(config.king_rate)) {
        b.Marker(MarkerKind::kKingSpace, b.Pos(), b.Pos());
        b.Text(config.king_char);
      }
      if (rng.Bernoulli(config.note_density)) {
        // Notes cover the one or two letters that follow.
        static constexpr std::array<MarkerKind, 3> kNotes = {
            MarkerKind::kOmissionNote, MarkerKind::kComparativeNote, MarkerKind::kLinkingNote};
        const int start = b.Pos();
        b.Filler(1, 2);
        b.Marker(kNotes[rng.Below(3)], start, b.Pos());
      }
      if (any_entities && rng.Bernoulli(config.entity_rate)) {
        const EntityLabel label = DrawLabel(rng, config.label_weights);
        const auto& lex = lexicons[static_cast<int>(label)];
        const auto& surface = lex[rng.Below(lex.size())];
        b.Filler(1, 3);
        if (rng.Bernoulli(config.informative_marker_prob)) {
          b.Marker(MarkerKind::kPhraseBoundary, b.Pos(), b.Pos());
        }
        const auto& cues = config.cues[static_cast<int>(label)];
        if (!cues.empty() && rng.Bernoulli(config.cue_prob)) b.Text(cues[rng.Below(cues.size())]);
        b.Entity(label, surface);
        if (rng.Bernoulli(config.informative_marker_prob)) {
          b.Marker(MarkerKind::kPhraseBoundary, b.Pos(), b.Pos());
        }
        b.Filler(1, 3);
        ++book.planted[static_cast<int>(label)];
        if (future) {
          ++book.future_mentions;
          if (book.lexicons.unseen.count(surface)) ++book.future_unseen_mentions;
        }
      } else {
        b.Filler(3, 7);
      }
      if (rng.Bernoulli(config.marker_density)) {
        b.Marker(MarkerKind::kPhraseBoundary, b.Pos(), b.Pos());
      }
    }
    AnnotatedParagraph p = b.Take();
    char id[64];
    const std::string& reign = future ? config.future_reign : config.past_reign;
    std::snprintf(id, sizeof(id), "%s-%06d", reign.c_str(), index + 1);
    p.id = id;
    p.reign = reign;
    p.year = future ? rng.Between(config.future_year_from, config.future_year_to)
                    : rng.Between(config.past_year_from, config.past_year_to);
    // Zero-width markers can coincide (clause end right after an entity);
    // keep one per (offset, kind).
    std::stable_sort(p.markers.begin(), p.markers.end(),
                     [](const MarkerSpan& a, const MarkerSpan& b) { return a.start < b.start; });
    p.markers.erase(std::unique(p.markers.begin(), p.markers.end()), p.markers.end());
    ValidateParagraph(p);
    return p;
  };

  for (int i = 0; i < config.past_paragraphs; ++i) out.push_back(make(false, i));
  for (int i = 0; i < config.future_paragraphs; ++i) out.push_back(make(true, i));
  return out;
}

}  // namespace chrononer
