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

#include "stats/welch.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "common/error.h"

namespace chrononer {
namespace {

constexpr double kTolerance = 1e-12;
constexpr int kMaxIterations = 300;

// Continued fraction for I_x(a, b); converges quickly for x < (a+1)/(a+b+2).
double BetaContinuedFraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kTolerance) return h;
  }
  throw NumericalError("incomplete beta continued fraction did not converge (a=" +
                       std::to_string(a) + ", b=" + std::to_string(b) +
                       ", x=" + std::to_string(x) + ")");
}

}  // namespace

SampleSummary Summarize(const std::vector<double>& sample) {
  if (sample.size() < 2) throw DataError("a sample summary needs at least two values");
  SampleSummary s;
  s.n = static_cast<int64_t>(sample.size());
  double sum = 0.0;
  for (double v : sample) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  double ss = 0.0, comp = 0.0;
  for (double v : sample) {
    ss += (v - s.mean) * (v - s.mean);
    comp += v - s.mean;
  }
  s.variance = std::max(0.0, (ss - comp * comp / static_cast<double>(s.n)) /
                                 static_cast<double>(s.n - 1));
  return s;
}

TTestResult WelchT(const SampleSummary& a, const SampleSummary& b) {
  if (a.n < 2 || b.n < 2) throw DataError("Welch's t-test needs two samples of size >= 2");
  if (a.variance < 0 || b.variance < 0) throw DataError("negative sample variance");
  const double va = a.variance / static_cast<double>(a.n);
  const double vb = b.variance / static_cast<double>(b.n);
  const double se2 = va + vb;
  if (!(se2 > 0)) throw NumericalError("Welch's t-test: both samples have zero variance");
  TTestResult r;
  r.mean_a = a.mean;
  r.mean_b = b.mean;
  r.t_stat = (a.mean - b.mean) / std::sqrt(se2);
  r.df = se2 * se2 /
         (va * va / static_cast<double>(a.n - 1) + vb * vb / static_cast<double>(b.n - 1));
  r.p_value = StudentTTwoSided(r.t_stat, r.df);
  return r;
}

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw DataError("incomplete beta needs positive parameters");
  if (!(x >= 0 && x <= 1)) throw DataError("incomplete beta argument outside [0, 1]");
  if (x == 0) return 0.0;
  if (x == 1) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * BetaContinuedFraction(a, b, x) / a;
  return 1.0 - front * BetaContinuedFraction(b, a, 1.0 - x) / b;
}

double StudentTTwoSided(double t, double df) {
  if (!(df > 0)) throw DataError("Student t degrees of freedom must be positive");
  if (std::isnan(t)) throw DataError("Student t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  if (t == 0) return 1.0;
  // x = df/(df+t^2) computed without cancellation for large |t|.
  const double t2 = t * t;
  const double x = df / (df + t2);
  return std::clamp(RegularizedIncompleteBeta(0.5 * df, 0.5, x), 0.0, 1.0);
}

double StudentTSf(double t, double df) {
  const double tail = 0.5 * StudentTTwoSided(t, df);
  return t >= 0 ? tail : 1.0 - tail;
}

}  // namespace chrononer
