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

#ifndef CHRONONER_CORPUS_SYNTHETIC_H_
#define CHRONONER_CORPUS_SYNTHETIC_H_

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "corpus/types.h"

namespace chrononer {

// Generator settings for a two-period synthetic diary. Paragraphs are built
// from clauses of filler characters; some clauses carry an entity drawn
// from the period's lexicon, optionally preceded by a label-specific cue
// character and bracketed by phrase-boundary markers.
struct SynthConfig {
  std::u32string filler;
  // Pool used to invent lexicon entries that replace drifted ones.
  std::u32string name_chars;
  std::array<std::vector<std::u32string>, 3> lexicons;
  std::array<std::u32string, 3> cues;
  std::array<double, 3> label_weights = {0.6, 0.3, 0.1};
  char32_t king_char = U'王';

  std::string past_reign = "injo";
  int past_year_from = 1623;
  int past_year_to = 1649;
  int past_paragraphs = 0;
  std::string future_reign = "soonjong";
  int future_year_from = 1907;
  int future_year_to = 1910;
  int future_paragraphs = 0;

  // Target length is drawn from [min_length, max_length]; the clause that
  // crosses it is completed, so paragraphs can run a few letters over.
  int min_length = 24;
  int max_length = 48;
  double entity_rate = 0.5;
  double cue_prob = 0.5;
  // Probability of a phrase boundary right before / right after an entity.
  double informative_marker_prob = 0.8;
  // Probability of a phrase boundary at the end of any clause.
  double marker_density = 0.3;
  double note_density = 0.05;
  double king_rate = 0.03;
  // Fraction of each lexicon replaced by unseen entries in the future period.
  double drift = 0.0;
};

// Sizes for DefaultSynthConfig.
struct SynthShape {
  int filler_size = 160;
  int name_pool_size = 100;
  int shared_chars = 40;
  int person_lexicon = 60;
  int location_lexicon = 30;
  int book_lexicon = 12;
};

// Alphabet and lexicons drawn from a block of CJK ideographs.
SynthConfig DefaultSynthConfig(uint64_t seed, const SynthShape& shape = {});

struct SynthLexicons {
  std::array<std::vector<std::u32string>, 3> past;
  std::array<std::vector<std::u32string>, 3> future;
  // Future entries that never occur in the past lexicon.
  std::set<std::u32string> unseen;
};

// Bookkeeping of what the generator planted.
struct SynthLedger {
  SynthLexicons lexicons;
  std::array<int64_t, 3> planted = {0, 0, 0};
  int64_t future_mentions = 0;
  int64_t future_unseen_mentions = 0;
};

SynthLexicons BuildPeriodLexicons(const SynthConfig& config, uint64_t seed);

// Emits past paragraphs followed by future paragraphs in standoff form.
// Throws ConfigError when a label with positive weight has an empty lexicon
// or the length bounds are inconsistent.
std::vector<AnnotatedParagraph> GenerateSynthetic(const SynthConfig& config, uint64_t seed,
                                                  SynthLedger* ledger = nullptr);

}  // namespace chrononer

#endif  // CHRONONER_CORPUS_SYNTHETIC_H_
