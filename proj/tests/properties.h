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

// Property checks shared by the unit tests and the acceptance suite.

#ifndef CHRONONER_TESTS_PROPERTIES_H_
#define CHRONONER_TESTS_PROPERTIES_H_

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "common/random.h"
#include "corpus/bio.h"
#include "corpus/corpus.h"
#include "evaluation/scoring.h"

namespace chrononer::testing {

struct RoundTripTally {
  int64_t paragraphs = 0;
  int64_t entities = 0;
  int64_t marker_failures = 0;   // strip(add(p)) differs from strip(p)
  int64_t standoff_failures = 0;  // to_standoff(add(p)) loses text or entities
  int64_t bio_failures = 0;       // spans_from_bio(to_bio(x)) != x.entities
  int64_t surface_failures = 0;   // an entity's surface text changed
  std::string first_failure;

  int64_t failures() const {
    return marker_failures + standoff_failures + bio_failures + surface_failures;
  }
};

inline std::u32string SurfaceOf(const AnnotatedParagraph& p, const EntitySpan& e) {
  return p.text.substr(e.start, e.end - e.start);
}

// `standoff` paragraphs have glyph-free text.
inline RoundTripTally CheckCorpusRoundTrips(const std::vector<AnnotatedParagraph>& standoff) {
  RoundTripTally t;
  auto note = [&](int64_t& counter, const AnnotatedParagraph& p, const char* what) {
    ++counter;
    if (t.first_failure.empty()) t.first_failure = p.id + ": " + what;
  };
  for (const auto& p : standoff) {
    ++t.paragraphs;
    t.entities += static_cast<int64_t>(p.entities.size());
    const AnnotatedParagraph marked = AddMarkerView(p);
    const AnnotatedParagraph plain = StripMarkers(p);
    const AnnotatedParagraph back = StripMarkers(marked);
    if (back.text != plain.text || back.entities != plain.entities) {
      note(t.marker_failures, p, "strip(add(p)) != strip(p)");
    }
    const AnnotatedParagraph reparsed = ToStandoff(marked);
    if (reparsed.text != p.text || reparsed.entities != p.entities) {
      note(t.standoff_failures, p, "to_standoff(add(p)) != p");
    }
    for (size_t i = 0; i < p.entities.size(); ++i) {
      const auto s = SurfaceOf(p, p.entities[i]);
      if (i >= marked.entities.size() || SurfaceOf(marked, marked.entities[i]) != s ||
          i >= back.entities.size() || SurfaceOf(back, back.entities[i]) != s) {
        note(t.surface_failures, p, "entity surface changed");
      }
    }
    for (const auto* x : {&p, &marked}) {
      const TaggedSequence seq = ToBio(*x);
      if (!IsValidBio(seq.tags) || SpansFromBio(seq) != x->entities) {
        note(t.bio_failures, *x, "spans_from_bio(to_bio(p)) != p.entities");
      }
    }
  }
  return t;
}

struct ScoringTally {
  int64_t pairs = 0;
  int64_t violations = 0;
  std::string first_violation;
};

inline std::vector<EntitySpan> RandomSpans(Rng& rng, int n, int max_spans) {
  std::vector<EntitySpan> out;
  const int count = static_cast<int>(rng.Below(static_cast<uint64_t>(max_spans) + 1));
  for (int i = 0; i < count; ++i) {
    const int start = static_cast<int>(rng.Below(static_cast<uint64_t>(n - 1)));
    const int end = start + 1 + static_cast<int>(rng.Below(3));
    out.push_back({start, std::min(end, n), kEntityLabels[rng.Below(3)]});
  }
  return out;
}

// Bounds, symmetry and monotonicity of span scoring on random pairs drawn
// so that exact matches are common.
inline ScoringTally CheckScoringProperties(int pairs, uint64_t seed) {
  ScoringTally t;
  Rng rng(seed);
  auto fail = [&](const std::string& why) {
    ++t.violations;
    if (t.first_violation.empty()) t.first_violation = "pair " + std::to_string(t.pairs) + ": " + why;
  };
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  for (int i = 0; i < pairs; ++i, ++t.pairs) {
    const int n = 8;
    auto gold = RandomSpans(rng, n, 4);
    std::vector<EntitySpan> pred;
    for (const auto& g : gold) {
      if (rng.Bernoulli(0.5)) pred.push_back(g);
    }
    for (const auto& s : RandomSpans(rng, n, 3)) pred.push_back(s);
    const EvalResult r = ScoreSpans(gold, pred);
    const PrfCounts m = r.micro();
    if (!in01(m.precision()) || !in01(m.recall()) || !in01(m.f1())) fail("metric out of [0,1]");
    for (const auto& c : r.per_type) {
      if (c.tp < 0 || c.fp < 0 || c.fn < 0) fail("negative count");
      if (!in01(c.precision()) || !in01(c.recall()) || !in01(c.f1())) fail("per-type metric out of range");
    }
    if (m.tp > static_cast<int64_t>(gold.size()) || m.tp > static_cast<int64_t>(pred.size())) {
      fail("TP exceeds a span count");
    }
    if (m.tp + m.fn != static_cast<int64_t>(gold.size()) ||
        m.tp + m.fp != static_cast<int64_t>(pred.size())) {
      fail("counts do not partition the span lists");
    }
    const double p = m.precision(), rc = m.recall();
    if (p + rc > 0 && std::fabs(m.f1() - 2 * p * rc / (p + rc)) > 1e-15) fail("F1 formula");
    const PrfCounts swapped = ScoreSpans(pred, gold).micro();
    if (swapped.precision() != m.recall() || swapped.recall() != m.precision() ||
        std::fabs(swapped.f1() - m.f1()) > 1e-15) {
      fail("swapping gold and predicted");
    }
    // Adding a correct prediction (an unmatched gold span).
    std::vector<EntitySpan> unmatched = gold;
    for (const auto& s : pred) {
      auto it = std::find(unmatched.begin(), unmatched.end(), s);
      if (it != unmatched.end()) unmatched.erase(it);
    }
    if (!unmatched.empty()) {
      auto more = pred;
      more.push_back(unmatched[rng.Below(unmatched.size())]);
      if (ScoreSpans(gold, more).micro().f1() < m.f1()) fail("correct prediction lowered F1");
    }
    // Adding an incorrect prediction (a span absent from gold).
    EntitySpan wrong{n, n + 1, EntityLabel::kBook};
    auto more = pred;
    more.push_back(wrong);
    const PrfCounts w = ScoreSpans(gold, more).micro();
    if (w.precision() > m.precision()) fail("incorrect prediction raised precision");
    if (w.recall() != m.recall()) fail("incorrect prediction changed recall");
  }
  return t;
}

}  // namespace chrononer::testing

#endif  // CHRONONER_TESTS_PROPERTIES_H_
