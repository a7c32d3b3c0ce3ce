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

#include "stats/hypotheses.h"

#include <cstdio>
#include <set>

#include "common/error.h"
#include "evaluation/results_csv.h"

namespace chrononer {
namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string MeansText(const HypothesisOutcome& o) {
  // Paths listed alphabetically regardless of which one is favored.
  std::string fav = std::string(1, o.spec.favored) + ":" + Fixed(o.test.mean_a, 4);
  std::string base = std::string(1, o.spec.baseline) + ":" + Fixed(o.test.mean_b, 4);
  return o.spec.favored < o.spec.baseline ? fav + " / " + base : base + " / " + fav;
}

}  // namespace

const std::array<HypothesisSpec, 4>& Hypotheses() {
  static const std::array<HypothesisSpec, 4> kSpecs = {{
      {"H1", 'D', 'A', "past unmarked test: unmarked training beats marked training"},
      {"H2", 'C', 'E', "future unmarked test: marked training beats unmarked training"},
      {"H3", 'B', 'E', "future test: the marked setting beats the unmarked setting"},
      {"H4", 'A', 'F', "marked-to-unmarked transfer beats unmarked-to-marked transfer"},
  }};
  return kSpecs;
}

std::vector<HypothesisOutcome> TestHypotheses(const PathMatrix& matrix, double alpha,
                                              const std::vector<std::string>& models) {
  if (!(alpha > 0 && alpha <= 1)) throw ConfigError("alpha must lie in (0, 1]");
  if (matrix.cells.empty()) throw DataError("the results matrix is empty");
  const std::vector<std::string> selected = models.empty() ? matrix.Models() : models;
  auto pooled = [&](char path) {
    std::vector<double> out;
    for (const auto& m : selected) {
      if (!matrix.Has(m, path)) {
        throw DataError("no results for model '" + m + "' on path " + std::string(1, path));
      }
      const auto s = QualitySamples(matrix, m, path);
      out.insert(out.end(), s.begin(), s.end());
    }
    return out;
  };
  std::vector<HypothesisOutcome> out;
  for (const auto& spec : Hypotheses()) {
    HypothesisOutcome o;
    o.spec = spec;
    o.test = WelchT(Summarize(pooled(spec.favored)), Summarize(pooled(spec.baseline)));
    o.supported = o.test.p_value < alpha && o.test.mean_a > o.test.mean_b;
    out.push_back(o);
  }
  return out;
}

std::string_view VerdictText(bool supported) {
  return supported ? "Supported" : "not Supported";
}

std::string FormatHypothesisRow(const HypothesisOutcome& o) {
  return o.spec.id + "  " + Fixed(o.test.t_stat, 4) + "  " + Fixed(o.test.df, 2) + "  " +
         Fixed(o.test.p_value, 4) + "  " + MeansText(o) + "  " +
         std::string(VerdictText(o.supported));
}

std::string HypothesesMarkdown(const std::vector<HypothesisOutcome>& outcomes, double alpha) {
  std::string out = "| Hypothesis | Favored | Baseline | t | df | p | Mean | Verdict |\n";
  out += "|---|---|---|---:|---:|---:|---|---|\n";
  for (const auto& o : outcomes) {
    out += "| " + o.spec.id + " | " + std::string(1, o.spec.favored) + " | " +
           std::string(1, o.spec.baseline) + " | " + Fixed(o.test.t_stat, 4) + " | " +
           Fixed(o.test.df, 2) + " | " + Fixed(o.test.p_value, 4) + " | " + MeansText(o) +
           " | " + std::string(VerdictText(o.supported)) + " |\n";
  }
  out += "\nWelch's t-test, two-sided, alpha = " + FormatDouble(alpha) +
         ". t is favored minus baseline; Supported requires p < alpha and a higher favored "
         "mean. Samples pool per-type precision, recall and F1 over seeds and models; this "
         "composition of the quality score is an interpretation.\n";
  return out;
}

std::string HypothesesCsv(const std::vector<HypothesisOutcome>& outcomes) {
  std::string out = "hypothesis,t_stat,df,p_value,mean_favored,mean_baseline,verdict\n";
  for (const auto& o : outcomes) {
    out += o.spec.id + "," + FormatDouble(o.test.t_stat) + "," + FormatDouble(o.test.df) + "," +
           FormatDouble(o.test.p_value) + "," + FormatDouble(o.test.mean_a) + "," +
           FormatDouble(o.test.mean_b) + "," + std::string(VerdictText(o.supported)) + "\n";
  }
  return out;
}

}  // namespace chrononer
