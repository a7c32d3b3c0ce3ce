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

#ifndef CHRONONER_EVALUATION_RESULTS_CSV_H_
#define CHRONONER_EVALUATION_RESULTS_CSV_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "evaluation/paths.h"

namespace chrononer {

inline constexpr std::string_view kResultsHeader = "model,path,seed,metric,entity_type,value";

// Formats a double so that parsing it back yields the same value.
std::string FormatDouble(double v);

// One row per scalar: precision, recall, f1, tp, fp and fn for MICRO and
// each entity type, then tag accuracy (entity_type ALL) when known.
std::string ResultsCsv(const PathMatrix& matrix);
// Inverse of ResultsCsv. Throws DataError with a line number on malformed
// input or when derived metrics disagree with the counts.
PathMatrix ParseResultsCsv(std::istream& in);
PathMatrix ReadResultsCsv(const std::filesystem::path& path);

struct FiveNumber {
  int n = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

// Quantiles by linear interpolation between order statistics. Throws
// DataError on an empty sample.
FiveNumber Quantiles(std::vector<double> sample);

// Per (model, path): the spread of micro-F1 across seeds and of the pooled
// quality samples.
std::string BoxplotCsv(const PathMatrix& matrix);

}  // namespace chrononer

#endif  // CHRONONER_EVALUATION_RESULTS_CSV_H_
