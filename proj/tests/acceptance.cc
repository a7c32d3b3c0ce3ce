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

// Acceptance suite: runs every primary criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit status is non-zero if any
// criterion fails.
//
//   acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "common/checkpoint.h"
#include "common/random.h"
#include "corpus/synthetic.h"
#include "embeddings/provider.h"
#include "evaluation/results_csv.h"
#include "json.hpp"
#include "pipeline/config.h"
#include "pipeline/pipeline.h"
#include "stats/hypotheses.h"
#include "stats/welch.h"
#include "tagger/crf.h"
#include "tagger/tagger.h"
#include "tests/oracles.h"
#include "tests/properties.h"

#ifndef CHRONONER_SOURCE_DIR
#define CHRONONER_SOURCE_DIR "."
#endif

namespace chrononer {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first few failure reasons.
class Checker {
 public:
  void Expect(bool ok, const std::string& what) {
    if (ok) return;
    if (++failures_ <= 3) reasons_ += (reasons_.empty() ? "" : "; ") + what;
  }
  bool ok() const { return failures_ == 0; }
  std::string reasons() const {
    return failures_ > 3 ? reasons_ + "; ... (" + std::to_string(failures_) + " failures)"
                         : reasons_;
  }

 private:
  int failures_ = 0;
  std::string reasons_;
};

std::string Num(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

Eigen::MatrixXd RandomMatrix(int rows, int cols, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(gen);
  return m;
}

Outcome CrfExactness() {
  Checker c;
  std::mt19937_64 gen(1);
  double worst_score = 0, worst_logz = 0;
  int instances = 0;
  for (int trial = 0; trial < 600; ++trial, ++instances) {
    const int n = 1 + trial % 4;
    const int k = 1 + (trial / 4) % 3;
    const Eigen::MatrixXd e = RandomMatrix(n, k, gen);
    const Eigen::MatrixXd t = RandomMatrix(k + 2, k + 2, gen);
    const auto brute = testing::EnumerateCrf(e, t);
    const auto v = ViterbiDecode(e, t);
    const double ds = std::fabs(v.score - brute.max_score);
    const double dz = std::fabs(CrfLogPartition(e, t) - brute.log_partition);
    worst_score = std::max(worst_score, ds);
    worst_logz = std::max(worst_logz, dz);
    c.Expect(ds <= 1e-10, "Viterbi score off on instance " + std::to_string(trial));
    c.Expect(std::fabs(CrfScore(e, t, v.tags) - brute.max_score) <= 1e-10,
             "Viterbi path does not attain the maximum on instance " + std::to_string(trial));
    c.Expect(dz <= 1e-8, "log-partition off on instance " + std::to_string(trial));
  }
  return {c.ok(), std::to_string(instances) + " instances, max |score diff| " + Num(worst_score) +
                      ", max |logZ diff| " + Num(worst_logz) +
                      (c.ok() ? "" : " -- " + c.reasons())};
}

Outcome GradientChecks() {
  Checker c;
  double worst = 0;
  int tensors = 0;
  auto record = [&](const std::string& where, const std::vector<testing::GradCheckReport>& rs) {
    for (const auto& r : rs) {
      ++tensors;
      worst = std::max(worst, r.max_rel_error);
      c.Expect(r.max_rel_error <= 1e-4, where + "/" + r.tensor + " rel error " + Num(r.max_rel_error));
      c.Expect(r.max_abs_analytic > 0, where + "/" + r.tensor + " has an all-zero gradient");
    }
  };
  LmHyperparams hp;
  hp.d_emb = 3;
  hp.d_h = 4;
  hp.init_scale = 0.5;
  const Vocabulary vocab = Vocabulary::Build({U"abcab"}, 1);
  const std::vector<int> inputs = {1, 4, 5, 6, 4, 1}, targets = {4, 5, 6, 4, 2, 5};
  for (Direction dir : {Direction::kForward, Direction::kBackward}) {
    CharLanguageModel lm = CharLanguageModel::Initialize(dir, vocab, hp, 11);
    LstmState init = LstmState::Zero(4, 2);
    init.h.setConstant(0.1);
    ParameterList params = lm.NamedParameters();
    GradientList grads = ZeroGradients(params);
    lm.WindowLoss(inputs, targets, 3, 2, init, &grads, nullptr);
    record(dir == Direction::kForward ? "charlm-forward" : "charlm-backward",
           testing::CheckGradients(params, grads, [&] {
             return lm.WindowLoss(inputs, targets, 3, 2, init, nullptr, nullptr);
           }));
  }
  // Full tagger over contextual character-LM features.
  hp.epochs = 1;
  hp.batch = 2;
  hp.bptt = 4;
  const auto lms = PretrainCharLm({U"abcabd", U"dcbae"}, {}, hp, 2);
  const ProviderPtr provider = MakeProvider("charlm", lms.forward, lms.backward);
  TaggerHyperparams thp;
  thp.d_t = 3;
  thp.init_scale = 0.5;
  CrfTagger model = CrfTagger::Initialize(provider, thp, 5);
  const Eigen::MatrixXd f1 = provider->Embed(U"abca"), f2 = provider->Embed(U"dc"),
                        f3 = provider->Embed(U"eabdb");
  const std::vector<const Eigen::MatrixXd*> feats = {&f1, &f2, &f3};
  const std::vector<std::vector<int>> gold = {{1, 2, 0, 3}, {5, 6}, {0, 0, 3, 4, 0}};
  ParameterList params = model.NamedParameters();
  GradientList grads = ZeroGradients(params);
  model.BatchLoss(feats, gold, &grads);
  record("tagger", testing::CheckGradients(
                       params, grads, [&] { return model.BatchLoss(feats, gold, nullptr); }));
  return {c.ok(), std::to_string(tensors) + " tensors, max relative error " + Num(worst) +
                      (c.ok() ? "" : " -- " + c.reasons())};
}

Outcome StatsOracles() {
  Checker c;
  const TTestResult fixed = WelchT(Summarize({2.1, 2.5, 2.3, 2.7}), Summarize({1.9, 2.0, 2.2}));
  c.Expect(std::fabs(fixed.t_stat - 2.3452078799117147773) <= 1e-10, "frozen t");
  c.Expect(std::fabs(fixed.df - 4.864321608040201005) <= 1e-10, "frozen df");
  c.Expect(std::fabs(fixed.p_value - 0.06738977893750972089) <= 1e-10, "frozen p");
  Rng rng(2024);
  double worst_welch = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> a(rng.Between(2, 40)), b(rng.Between(2, 40));
    const double shift = rng.Uniform(-0.5, 0.5), scale = rng.Uniform(0.05, 2.0);
    for (double& v : a) v = rng.Uniform();
    for (double& v : b) v = shift + scale * rng.Uniform();
    const TTestResult r = WelchT(Summarize(a), Summarize(b));
    const testing::WelchOracle o = testing::WelchReference(a, b);
    const double d = std::max({std::fabs(r.t_stat - o.t), std::fabs(r.df - o.df),
                               std::fabs(r.p_value - o.p)});
    worst_welch = std::max(worst_welch, d);
    c.Expect(d <= 1e-10, "welch pair " + std::to_string(i) + " off by " + Num(d));
  }
  double worst_sf = 0;
  int points = 0;
  for (double df : {1.0, 2.0, 3.5, 10.0, 119.27, 267.34}) {
    for (double t : {-4.0, -1.0, -0.25, 0.0, 0.5, 1.0, 2.5, 4.2575, 12.0}) {
      ++points;
      const double d = std::fabs(StudentTSf(t, df) - testing::StudentTSfQuadrature(t, df));
      worst_sf = std::max(worst_sf, d);
      c.Expect(d <= 1e-9, "sf(" + Num(t) + ", " + Num(df) + ") off by " + Num(d));
    }
  }
  return {c.ok(), "100 Welch pairs, max diff " + Num(worst_welch) + "; " + std::to_string(points) +
                      " sf points, max diff " + Num(worst_sf) +
                      (c.ok() ? "" : " -- " + c.reasons())};
}

Outcome Scoring() {
  Checker c;
  constexpr auto kPer = EntityLabel::kPerson, kLoc = EntityLabel::kLocation,
                 kBook = EntityLabel::kBook;
  const PrfCounts m =
      ScoreSpans({{0, 2, kPer}, {5, 7, kLoc}}, {{0, 2, kPer}, {6, 7, kLoc}, {9, 10, kBook}})
          .micro();
  c.Expect(m.tp == 1 && m.fp == 2 && m.fn == 1, "hand-counted fixture counts");
  c.Expect(std::fabs(m.precision() - 1.0 / 3) < 1e-15 && std::fabs(m.recall() - 0.5) < 1e-15 &&
               std::fabs(m.f1() - 0.4) < 1e-15,
           "P=1/3, R=1/2, F1=0.4 fixture");
  const std::vector<EntitySpan> gold = {{0, 2, kPer}, {3, 4, kBook}};
  const PrfCounts same = ScoreSpans(gold, gold).micro();
  c.Expect(same.precision() == 1 && same.recall() == 1 && same.f1() == 1, "perfect prediction");
  const PrfCounts none = ScoreSpans(gold, {}).micro();
  c.Expect(none.precision() == 0 && none.recall() == 0 && none.f1() == 0, "empty prediction");
  const auto t = testing::CheckScoringProperties(1000, 17);
  c.Expect(t.violations == 0, t.first_violation);
  return {c.ok(), "4 fixtures, " + std::to_string(t.pairs) + " random pairs, " +
                      std::to_string(t.violations) + " property violations" +
                      (c.ok() ? "" : " -- " + c.reasons())};
}

Outcome CorpusTransformations() {
  SynthConfig config = DefaultSynthConfig(11);
  config.past_paragraphs = 8000;
  config.future_paragraphs = 2000;
  const auto corpus = GenerateSynthetic(config, 11);
  const auto t = testing::CheckCorpusRoundTrips(corpus);
  const bool ok = t.paragraphs == 10000 && t.failures() == 0;
  return {ok, std::to_string(t.paragraphs) + " paragraphs, " + std::to_string(t.entities) +
                  " entities; failures: marker " + std::to_string(t.marker_failures) +
                  ", standoff " + std::to_string(t.standoff_failures) + ", BIO " +
                  std::to_string(t.bio_failures) + ", surface " +
                  std::to_string(t.surface_failures) +
                  (t.first_failure.empty() ? "" : " -- " + t.first_failure)};
}

struct DemoRun {
  fs::path out;
  double seconds = 0;
  std::string error;
};

DemoRun RunDemo(const fs::path& out) {
  DemoRun run{out};
  const auto start = Clock::now();
  try {
    fs::remove_all(out);
    Config raw;
    raw.LoadFile(fs::path(CHRONONER_SOURCE_DIR) / "configs" / "demo.ini");
    raw.Set("run.out", out.string());
    const ExperimentConfig config = ResolveConfig(raw);
    RunPrepare(config);
    RunPretrain(config);
    RunPaths(config);
    RunHypotheses(config);
    RunReport(config);
  } catch (const std::exception& e) {
    run.error = e.what();
  }
  run.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return run;
}

Outcome EndToEnd(const DemoRun& run) {
  if (!run.error.empty()) return {false, "demo run failed: " + run.error};
  Checker c;
  const PathMatrix matrix = ReadResultsCsv(OutputLayout(run.out).Results());
  auto mean_f1 = [&](char path, double* min_f1 = nullptr) {
    const auto& runs = matrix.cells.at({"charlm", path});
    double sum = 0, lo = 1;
    for (const auto& [seed, r] : runs) {
      sum += r.micro().f1();
      lo = std::min(lo, r.micro().f1());
    }
    if (min_f1 != nullptr) *min_f1 = lo;
    return sum / static_cast<double>(runs.size());
  };
  c.Expect(matrix.Has("charlm", 'D') && matrix.Has("charlm", 'C'), "charlm results missing");
  if (!c.ok()) return {false, c.reasons()};
  c.Expect(matrix.cells.at({"charlm", 'D'}).size() == 3, "expected three seeds");
  double d_min = 0;
  const double d = mean_f1('D', &d_min), cc = mean_f1('C');
  c.Expect(d_min >= 0.90, "path D micro-F1 below 0.90 (min over seeds " + Num(d_min, 4) + ")");
  c.Expect(d > cc, "path D mean not above path C mean");
  const auto outcomes = TestHypotheses(matrix, kDefaultAlpha);
  c.Expect(outcomes.size() == 4, "expected four hypothesis rows");
  std::string rows;
  for (const auto& o : outcomes) {
    const std::string row = FormatHypothesisRow(o);
    rows += "\n    " + row;
    if (o.spec.id == "H1" || o.spec.id == "H3") {
      c.Expect(o.test.mean_a > o.test.mean_b, o.spec.id + " not directionally consistent");
    }
  }
  // The demo is also expected to support H3 at the looser level 0.05.
  for (const auto& o : TestHypotheses(matrix, 0.05)) {
    if (o.spec.id == "H3") c.Expect(o.supported, "H3 not supported at alpha 0.05");
  }
  c.Expect(run.seconds < 15 * 60, "runtime " + Num(run.seconds) + " s exceeds 15 min");
  return {c.ok(), "D mean " + Num(d, 4) + " (min " + Num(d_min, 4) + "), C mean " + Num(cc, 4) +
                      ", " + Num(run.seconds, 4) + " s" + (c.ok() ? "" : " -- " + c.reasons()) +
                      rows};
}

Outcome Determinism(const DemoRun& first, const DemoRun& second) {
  if (!first.error.empty() || !second.error.empty()) {
    return {false, "demo run failed: " + first.error + second.error};
  }
  Checker c;
  const OutputLayout a(first.out), b(second.out);
  c.Expect(ReadFileBytes(a.Results()) == ReadFileBytes(b.Results()), "results.csv differs");
  const auto ma = nlohmann::json::parse(ReadFileBytes(a.Manifest()));
  const auto mb = nlohmann::json::parse(ReadFileBytes(b.Manifest()));
  c.Expect(ma["config_digest"] == mb["config_digest"], "config digests differ");
  std::string differing;
  for (const auto& [rel, digest] : ma["artifacts"].items()) {
    if (!mb["artifacts"].contains(rel) || mb["artifacts"][rel] != digest) differing += " " + rel;
  }
  c.Expect(ma["artifacts"].size() == mb["artifacts"].size(), "artifact sets differ");
  c.Expect(differing.empty(), "artifact digests differ:" + differing);
  return {c.ok(), std::to_string(ma["artifacts"].size()) + " artifact digests and results.csv" +
                      (c.ok() ? " identical" : " -- " + c.reasons())};
}

int Main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  auto wanted = [&](int n) { return selected.empty() || selected.count(n) > 0; };
  int failed = 0;
  auto report = [&](int n, const std::string& name, double budget, const std::function<Outcome()>& fn) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (budget > 0 && secs > budget) {
      o.pass = false;
      o.detail += " -- exceeded the " + Num(budget) + " s budget";
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s criterion %d: %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", n, name.c_str(),
                secs, o.detail.c_str());
    std::fflush(stdout);
  };
  if (wanted(1)) report(1, "CRF exactness", 10, CrfExactness);
  if (wanted(2)) report(2, "gradient checks", 60, GradientChecks);
  if (wanted(3)) report(3, "statistics oracles", 30, StatsOracles);
  if (wanted(4)) report(4, "scoring oracle", 0, Scoring);
  if (wanted(5)) report(5, "corpus transformations", 0, CorpusTransformations);
  if (wanted(6) || wanted(7)) {
    const fs::path root = fs::temp_directory_path() / "chrononer_acceptance";
    DemoRun first;
    if (wanted(6)) {
      report(6, "end-to-end demo", 0, [&] {
        first = RunDemo(root / "run1");
        return EndToEnd(first);
      });
    }
    if (wanted(7)) {
      report(7, "determinism", 0, [&] {
        if (first.out.empty()) first = RunDemo(root / "run1");
        return Determinism(first, RunDemo(root / "run2"));
      });
    }
    if (failed == 0) fs::remove_all(root);
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace chrononer

int main(int argc, char** argv) { return chrononer::Main(argc, argv); }
