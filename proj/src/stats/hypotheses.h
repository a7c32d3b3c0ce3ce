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

#ifndef CHRONONER_STATS_HYPOTHESES_H_
#define CHRONONER_STATS_HYPOTHESES_H_

#include <array>
#include <string>
#include <vector>

#include "evaluation/paths.h"
#include "stats/welch.h"

namespace chrononer {

inline constexpr double kDefaultAlpha = 0.005;

struct HypothesisSpec {
  std::string id;
  char favored = 'A';
  char baseline = 'A';
  std::string claim;
};

// H1: D over A, H2: C over E, H3: B over E, H4: A over F.
const std::array<HypothesisSpec, 4>& Hypotheses();

struct HypothesisOutcome {
  HypothesisSpec spec;
  // Sample a is the favored path, b the baseline: t > 0 when the favored
  // path scores higher.
  TTestResult test;
  bool supported = false;
};

// Pools the quality samples of the selected models (all models in the
// matrix when `models` is empty) per path and tests each hypothesis.
// Supported means p < alpha and a favored mean above the baseline mean.
std::vector<HypothesisOutcome> TestHypotheses(const PathMatrix& matrix, double alpha,
                                              const std::vector<std::string>& models = {});

std::string_view VerdictText(bool supported);

// `H1  4.2575  119.27  0.0000  A:0.8338 / D:0.9055  Supported`
std::string FormatHypothesisRow(const HypothesisOutcome& o);

std::string HypothesesMarkdown(const std::vector<HypothesisOutcome>& outcomes, double alpha);
// hypothesis,t_stat,df,p_value,mean_favored,mean_baseline,verdict
std::string HypothesesCsv(const std::vector<HypothesisOutcome>& outcomes);

}  // namespace chrononer

#endif  // CHRONONER_STATS_HYPOTHESES_H_
