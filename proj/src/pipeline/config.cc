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

#include "pipeline/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "common/digest.h"
#include "common/error.h"
#include "evaluation/results_csv.h"

namespace chrononer {
namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> SplitList(std::string_view s) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    const size_t comma = std::min(s.find(',', pos), s.size());
    std::string item = Trim(s.substr(pos, comma - pos));
    if (!item.empty()) out.push_back(item);
    pos = comma + 1;
  }
  return out;
}

// Typed access that records the normalized form of every value read.
class Reader {
 public:
  explicit Reader(const Config& c) : c_(c) {}

  std::string Str(const std::string& key) {
    const std::string v = Trim(c_.Get(key));
    Note(key, v);
    return v;
  }

  int64_t Int(const std::string& key, int64_t lo, int64_t hi) {
    const std::string v = Trim(c_.Get(key));
    int64_t x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) {
      throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
    if (x < lo || x > hi) {
      throw ConfigError(key + ": " + v + " is outside [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
    }
    Note(key, std::to_string(x));
    return x;
  }

  uint64_t Unsigned(const std::string& key, std::string_view text) {
    uint64_t x = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (ec != std::errc() || p != text.data() + text.size()) {
      throw ConfigError(key + ": expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return x;
  }

  // `open_lo` excludes the lower bound.
  double Real(const std::string& key, double lo, double hi, bool open_lo = false) {
    const std::string v = Trim(c_.Get(key));
    double x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x)) {
      throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
    if (x < lo || x > hi || (open_lo && x == lo)) {
      throw ConfigError(key + ": " + v + " is outside " + (open_lo ? "(" : "[") +
                        FormatDouble(lo) + ", " + FormatDouble(hi) + "]");
    }
    Note(key, FormatDouble(x));
    return x;
  }

  std::vector<std::string> List(const std::string& key) {
    auto items = SplitList(c_.Get(key));
    std::string joined;
    for (const auto& i : items) joined += (joined.empty() ? "" : ",") + i;
    Note(key, joined);
    return items;
  }

  std::string Canonical() const {
    std::string out;
    for (const auto& [k, v] : normalized_) {
      if (k == "run.out" || k == "run.jobs") continue;
      out += k + "=" + v + "\n";
    }
    return out;
  }

 private:
  void Note(const std::string& key, const std::string& v) { normalized_[key] = v; }

  const Config& c_;
  std::map<std::string, std::string> normalized_;
};

}  // namespace

const std::vector<ConfigKey>& ConfigSchema() {
  static const std::vector<ConfigKey> kSchema = {
      {"run.out", "out", "output directory; every artifact is written below it"},
      {"run.seed", "7", "seed for corpus generation, splitting and pretraining"},
      {"run.seeds", "1,2,3", "comma-separated tagger training seeds"},
      {"run.jobs", "1", "number of training jobs run concurrently"},
      {"run.models", "charlm,static", "comma-separated embedding providers (charlm, static)"},
      {"corpus.source", "synthetic", "synthetic or file"},
      {"corpus.path", "", "JSON Lines corpus read when corpus.source = file"},
      {"corpus.past_reigns", "injo", "comma-separated reigns forming the past period"},
      {"corpus.future_reigns", "soonjong", "comma-separated reigns forming the future period"},
      {"corpus.train_ratio", "0.8", "fraction of each period used for training"},
      {"corpus.dev_ratio", "0.1", "fraction of each period used for model selection"},
      {"corpus.test_ratio", "0.1", "fraction of each period held out for testing"},
      {"synth.past_paragraphs", "2000", "generated past paragraphs"},
      {"synth.future_paragraphs", "500", "generated future paragraphs"},
      {"synth.past_reign", "injo", "reign label of generated past paragraphs"},
      {"synth.future_reign", "soonjong", "reign label of generated future paragraphs"},
      {"synth.min_length", "24", "lower bound of the per-paragraph target length"},
      {"synth.max_length", "48", "upper bound of the target length; the last clause may overrun"},
      {"synth.entity_rate", "0.5", "probability that a clause carries an entity"},
      {"synth.cue_prob", "0.5", "probability of a label cue character before an entity"},
      {"synth.informative_marker_prob", "0.8",
       "probability of a phrase boundary on each side of an entity"},
      {"synth.marker_density", "0.3", "probability of a phrase boundary after any clause"},
      {"synth.note_density", "0.05", "probability of a note marker per clause"},
      {"synth.king_rate", "0.03", "probability of a king mention per clause"},
      {"synth.drift", "0.5", "fraction of each lexicon replaced in the future period"},
      {"lm.d_emb", "16", "character embedding size"},
      {"lm.d_h", "64", "language model hidden size"},
      {"lm.lr", "5.0", "SGD learning rate"},
      {"lm.epochs", "4", "pretraining epochs"},
      {"lm.batch", "16", "parallel character streams"},
      {"lm.bptt", "32", "truncated backpropagation window"},
      {"lm.clip", "5.0", "global gradient-norm clip"},
      {"lm.min_count", "1", "minimum character count for the vocabulary"},
      {"lm.init_scale", "0.1", "uniform initialization half-width"},
      {"tagger.d_t", "24", "tagger LSTM hidden size per direction"},
      {"tagger.lr", "0.01", "tagger learning rate"},
      {"tagger.epochs", "6", "tagger training epochs"},
      {"tagger.batch", "16", "sequences per minibatch"},
      {"tagger.clip", "5.0", "global gradient-norm clip"},
      {"tagger.max_len", "256", "longest training segment and prediction window"},
      {"tagger.overlap", "16", "overlap between consecutive windows"},
      {"tagger.optimizer", "adam", "adam or sgd"},
      {"tagger.init_scale", "0.1", "uniform initialization half-width"},
      {"stats.alpha", "0.005", "significance level of the hypothesis tests"},
      {"stats.models", "", "models pooled in the hypothesis tests (empty: all)"},
  };
  return kSchema;
}

const std::vector<std::string>& KnownModels() {
  static const std::vector<std::string> kModels = {"charlm", "static"};
  return kModels;
}

Config::Config() {
  for (const auto& k : ConfigSchema()) values_[k.name] = k.default_value;
}

void Config::Set(std::string_view key, std::string_view value) {
  auto it = values_.find(std::string(key));
  if (it == values_.end()) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  it->second = std::string(value);
}

const std::string& Config::Get(std::string_view key) const {
  auto it = values_.find(std::string(key));
  if (it == values_.end()) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  return it->second;
}

void Config::LoadString(std::string_view ini) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(ini)};
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError("config key '" + section + "' must be inside a [section]");
    }
    for (const auto& [key, value] : body) {
      Set(section + "." + key, value.get_value<std::string>());
    }
  }
}

void Config::LoadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    LoadString(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ExperimentConfig ResolveConfig(const Config& config) {
  Reader r(config);
  ExperimentConfig c;
  constexpr int64_t kBig = 1'000'000'000;

  c.out = r.Str("run.out");
  if (c.out.empty()) throw ConfigError("run.out: output directory must not be empty");
  c.seed = r.Unsigned("run.seed", r.Str("run.seed"));
  {
    const auto items = r.List("run.seeds");
    if (items.empty()) throw ConfigError("run.seeds: at least one seed is required");
    for (const auto& s : items) c.seeds.push_back(r.Unsigned("run.seeds", s));
    if (std::set<uint64_t>(c.seeds.begin(), c.seeds.end()).size() != c.seeds.size()) {
      throw ConfigError("run.seeds: seeds must be distinct");
    }
  }
  c.jobs = static_cast<int>(r.Int("run.jobs", 1, 256));
  c.models = r.List("run.models");
  if (c.models.empty()) throw ConfigError("run.models: the model list is empty");
  for (const auto& m : c.models) {
    if (std::find(KnownModels().begin(), KnownModels().end(), m) == KnownModels().end()) {
      throw ConfigError("run.models: unknown model '" + m + "' (expected charlm or static)");
    }
  }
  if (std::set<std::string>(c.models.begin(), c.models.end()).size() != c.models.size()) {
    throw ConfigError("run.models: duplicate model name");
  }

  c.corpus_source = r.Str("corpus.source");
  if (c.corpus_source != "synthetic" && c.corpus_source != "file") {
    throw ConfigError("corpus.source: expected synthetic or file, got '" + c.corpus_source + "'");
  }
  c.corpus_path = r.Str("corpus.path");
  if (c.corpus_source == "file" && c.corpus_path.empty()) {
    throw ConfigError("corpus.path: required when corpus.source = file");
  }
  for (const auto& s : r.List("corpus.past_reigns")) c.past_reigns.insert(s);
  for (const auto& s : r.List("corpus.future_reigns")) c.future_reigns.insert(s);
  if (c.past_reigns.empty() || c.future_reigns.empty()) {
    throw ConfigError("corpus.past_reigns / corpus.future_reigns must not be empty");
  }
  for (const auto& s : c.past_reigns) {
    if (c.future_reigns.count(s)) {
      throw ConfigError("reign '" + s + "' is listed as both past and future");
    }
  }
  c.ratios.train = r.Real("corpus.train_ratio", 0, 1, true);
  c.ratios.dev = r.Real("corpus.dev_ratio", 0, 1);
  c.ratios.test = r.Real("corpus.test_ratio", 0, 1, true);
  if (std::fabs(c.ratios.train + c.ratios.dev + c.ratios.test - 1.0) > 1e-9) {
    throw ConfigError("corpus.*_ratio: train, dev and test ratios must sum to 1");
  }

  c.synth = DefaultSynthConfig(c.seed);
  c.synth.past_paragraphs = static_cast<int>(r.Int("synth.past_paragraphs", 0, kBig));
  c.synth.future_paragraphs = static_cast<int>(r.Int("synth.future_paragraphs", 0, kBig));
  c.synth.past_reign = r.Str("synth.past_reign");
  c.synth.future_reign = r.Str("synth.future_reign");
  c.synth.min_length = static_cast<int>(r.Int("synth.min_length", 1, kBig));
  c.synth.max_length = static_cast<int>(r.Int("synth.max_length", 1, kBig));
  if (c.synth.min_length > c.synth.max_length) {
    throw ConfigError("synth.min_length must not exceed synth.max_length");
  }
  c.synth.entity_rate = r.Real("synth.entity_rate", 0, 1);
  c.synth.cue_prob = r.Real("synth.cue_prob", 0, 1);
  c.synth.informative_marker_prob = r.Real("synth.informative_marker_prob", 0, 1);
  c.synth.marker_density = r.Real("synth.marker_density", 0, 1);
  c.synth.note_density = r.Real("synth.note_density", 0, 1);
  c.synth.king_rate = r.Real("synth.king_rate", 0, 1);
  c.synth.drift = r.Real("synth.drift", 0, 1);
  if (c.corpus_source == "synthetic") {
    if (!c.past_reigns.count(c.synth.past_reign) || !c.future_reigns.count(c.synth.future_reign)) {
      throw ConfigError(
          "synth.past_reign / synth.future_reign must belong to corpus.past_reigns / "
          "corpus.future_reigns");
    }
  }

  c.lm.d_emb = static_cast<int>(r.Int("lm.d_emb", 1, 4096));
  c.lm.d_h = static_cast<int>(r.Int("lm.d_h", 1, 4096));
  c.lm.lr = r.Real("lm.lr", 0, 1e6, true);
  c.lm.epochs = static_cast<int>(r.Int("lm.epochs", 0, 100000));
  c.lm.batch = static_cast<int>(r.Int("lm.batch", 1, 100000));
  c.lm.bptt = static_cast<int>(r.Int("lm.bptt", 1, 100000));
  c.lm.clip = r.Real("lm.clip", 0, 1e12, true);
  c.lm.min_count = static_cast<int>(r.Int("lm.min_count", 1, kBig));
  c.lm.init_scale = r.Real("lm.init_scale", 0, 10, true);

  c.tagger.d_t = static_cast<int>(r.Int("tagger.d_t", 1, 4096));
  c.tagger.lr = r.Real("tagger.lr", 0, 1e6, true);
  c.tagger.epochs = static_cast<int>(r.Int("tagger.epochs", 0, 100000));
  c.tagger.batch = static_cast<int>(r.Int("tagger.batch", 1, 100000));
  c.tagger.clip = r.Real("tagger.clip", 0, 1e12, true);
  c.tagger.max_len = static_cast<int>(r.Int("tagger.max_len", 2, kBig));
  c.tagger.overlap = static_cast<int>(r.Int("tagger.overlap", 0, kBig));
  if (c.tagger.overlap >= c.tagger.max_len) {
    throw ConfigError("tagger.overlap must be smaller than tagger.max_len");
  }
  c.tagger.optimizer = r.Str("tagger.optimizer");
  if (c.tagger.optimizer != "adam" && c.tagger.optimizer != "sgd") {
    throw ConfigError("tagger.optimizer: expected adam or sgd, got '" + c.tagger.optimizer + "'");
  }
  c.tagger.init_scale = r.Real("tagger.init_scale", 0, 10, true);

  c.alpha = r.Real("stats.alpha", 0, 1, true);
  c.stats_models = r.List("stats.models");
  for (const auto& m : c.stats_models) {
    if (std::find(c.models.begin(), c.models.end(), m) == c.models.end()) {
      throw ConfigError("stats.models: '" + m + "' is not listed in run.models");
    }
  }

  c.canonical = r.Canonical();
  c.digest = Sha256Hex(c.canonical);
  return c;
}

}  // namespace chrononer
