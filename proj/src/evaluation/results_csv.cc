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

#include "evaluation/results_csv.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

#include "common/error.h"

namespace chrononer {
namespace {

constexpr std::array<std::string_view, 6> kMetrics = {"precision", "recall", "f1",
                                                      "tp",        "fp",     "fn"};

void AppendCounts(std::string& out, const std::string& prefix, std::string_view type,
                  const PrfCounts& c) {
  const double values[6] = {c.precision(), c.recall(), c.f1(), static_cast<double>(c.tp),
                            static_cast<double>(c.fp), static_cast<double>(c.fn)};
  for (int i = 0; i < 6; ++i) {
    out += prefix;
    out += kMetrics[i];
    out += ',';
    out += type;
    out += ',';
    out += FormatDouble(values[i]);
    out += '\n';
  }
}

std::vector<std::string> SplitCommas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct Pending {
  std::array<std::array<double, 6>, 4> values;  // MICRO, PERSON, LOCATION, BOOK
  std::array<std::array<bool, 6>, 4> seen{};
  std::optional<double> accuracy;
};

int TypeIndex(std::string_view type) {
  if (type == "MICRO") return 0;
  if (auto label = ParseLabel(type)) return 1 + static_cast<int>(*label);
  return -1;
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string ResultsCsv(const PathMatrix& matrix) {
  std::string out(kResultsHeader);
  out += '\n';
  for (const auto& [key, runs] : matrix.cells) {
    for (const auto& [seed, r] : runs) {
      const std::string prefix =
          key.first + "," + std::string(1, key.second) + "," + std::to_string(seed) + ",";
      AppendCounts(out, prefix, "MICRO", r.micro());
      for (EntityLabel label : kEntityLabels) AppendCounts(out, prefix, LabelName(label), r.of(label));
      if (r.accuracy) out += prefix + "accuracy,ALL," + FormatDouble(*r.accuracy) + "\n";
    }
  }
  return out;
}

PathMatrix ParseResultsCsv(std::istream& in) {
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line) || line != kResultsHeader) {
    throw DataError("results CSV line 1: expected header '" + std::string(kResultsHeader) + "'");
  }
  std::map<std::tuple<std::string, char, uint64_t>, Pending> pending;
  std::vector<std::tuple<std::string, char, uint64_t>> order;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) {
      return DataError("results CSV line " + std::to_string(line_no) + ": " + why);
    };
    const auto f = SplitCommas(line);
    if (f.size() != 6) throw fail("expected 6 fields");
    if (f[0].empty()) throw fail("empty model name");
    if (f[1].size() != 1) throw fail("bad path '" + f[1] + "'");
    try {
      PathByName(f[1][0]);
    } catch (const ConfigError&) {
      throw fail("unknown path '" + f[1] + "'");
    }
    uint64_t seed = 0;
    auto [ptr, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), seed);
    if (ec != std::errc() || ptr != f[2].data() + f[2].size()) throw fail("bad seed '" + f[2] + "'");
    double value = 0;
    {
      auto [p2, ec2] = std::from_chars(f[5].data(), f[5].data() + f[5].size(), value);
      if (ec2 != std::errc() || p2 != f[5].data() + f[5].size()) {
        throw fail("bad value '" + f[5] + "'");
      }
    }
    auto key = std::make_tuple(f[0], f[1][0], seed);
    auto [it, inserted] = pending.try_emplace(key);
    if (inserted) order.push_back(key);
    Pending& p = it->second;
    if (f[3] == "accuracy") {
      if (f[4] != "ALL") throw fail("accuracy must have entity_type ALL");
      if (value < 0 || value > 1) throw fail("accuracy out of range");
      p.accuracy = value;
      continue;
    }
    const int type = TypeIndex(f[4]);
    if (type < 0) throw fail("unknown entity type '" + f[4] + "'");
    const auto m = std::find(kMetrics.begin(), kMetrics.end(), f[3]);
    if (m == kMetrics.end()) throw fail("unknown metric '" + f[3] + "'");
    const int mi = static_cast<int>(m - kMetrics.begin());
    if (p.seen[type][mi]) throw fail("duplicate row");
    p.seen[type][mi] = true;
    p.values[type][mi] = value;
  }
  PathMatrix matrix;
  for (const auto& key : order) {
    const Pending& p = pending[key];
    const std::string where = "results CSV: " + std::get<0>(key) + "/" +
                              std::string(1, std::get<1>(key)) + "/seed " +
                              std::to_string(std::get<2>(key));
    EvalResult r;
    for (int t = 0; t < 4; ++t) {
      for (int m = 0; m < 6; ++m) {
        if (!p.seen[t][m]) throw DataError(where + ": missing rows");
      }
      PrfCounts c;
      for (int m = 3; m < 6; ++m) {
        const double v = p.values[t][m];
        if (v < 0 || v != static_cast<double>(static_cast<int64_t>(v))) {
          throw DataError(where + ": counts must be non-negative integers");
        }
      }
      c.tp = static_cast<int64_t>(p.values[t][3]);
      c.fp = static_cast<int64_t>(p.values[t][4]);
      c.fn = static_cast<int64_t>(p.values[t][5]);
      if (c.precision() != p.values[t][0] || c.recall() != p.values[t][1] ||
          c.f1() != p.values[t][2]) {
        throw DataError(where + ": precision/recall/f1 disagree with the counts");
      }
      if (t > 0) r.per_type[t - 1] = c;
    }
    if (r.micro() != PrfCounts{static_cast<int64_t>(p.values[0][3]),
                               static_cast<int64_t>(p.values[0][4]),
                               static_cast<int64_t>(p.values[0][5])}) {
      throw DataError(where + ": MICRO counts are not the sum of the per-type counts");
    }
    r.accuracy = p.accuracy;
    matrix.cells[{std::get<0>(key), std::get<1>(key)}][std::get<2>(key)] = r;
  }
  return matrix;
}

PathMatrix ReadResultsCsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open results file " + path.string());
  return ParseResultsCsv(in);
}

FiveNumber Quantiles(std::vector<double> sample) {
  if (sample.empty()) throw DataError("cannot summarize an empty sample");
  std::sort(sample.begin(), sample.end());
  const auto q = [&](double p) {
    const double h = p * static_cast<double>(sample.size() - 1);
    const size_t lo = static_cast<size_t>(h);
    const size_t hi = std::min(lo + 1, sample.size() - 1);
    return sample[lo] + (h - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
  };
  FiveNumber f;
  f.n = static_cast<int>(sample.size());
  f.min = sample.front();
  f.q1 = q(0.25);
  f.median = q(0.5);
  f.q3 = q(0.75);
  f.max = sample.back();
  f.mean = std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(sample.size());
  return f;
}

std::string BoxplotCsv(const PathMatrix& matrix) {
  std::string out = "model,path,statistic,n,min,q1,median,q3,max,mean\n";
  auto row = [&](const std::pair<std::string, char>& key, std::string_view stat,
                 const FiveNumber& f) {
    out += key.first + "," + std::string(1, key.second) + "," + std::string(stat) + "," +
           std::to_string(f.n) + "," + FormatDouble(f.min) + "," + FormatDouble(f.q1) + "," +
           FormatDouble(f.median) + "," + FormatDouble(f.q3) + "," + FormatDouble(f.max) + "," +
           FormatDouble(f.mean) + "\n";
  };
  for (const auto& [key, runs] : matrix.cells) {
    std::vector<double> f1;
    for (const auto& [seed, r] : runs) f1.push_back(r.micro().f1());
    row(key, "micro_f1", Quantiles(f1));
    const auto quality = QualitySamples(matrix, key.first, key.second);
    if (!quality.empty()) row(key, "quality", Quantiles(quality));
  }
  return out;
}

}  // namespace chrononer
