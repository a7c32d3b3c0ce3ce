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

#ifndef CHRONONER_STATS_WELCH_H_
#define CHRONONER_STATS_WELCH_H_

#include <cstdint>
#include <vector>

namespace chrononer {

struct SampleSummary {
  int64_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};

// Throws DataError when fewer than two values are given.
SampleSummary Summarize(const std::vector<double>& sample);

struct TTestResult {
  double t_stat = 0.0;
  double df = 0.0;
  double p_value = 1.0;  // two-sided
  double mean_a = 0.0;
  double mean_b = 0.0;
};

// Unequal-variance two-sample t-test of a against b; t > 0 when a's mean is
// larger. Throws NumericalError when the standard error is zero.
TTestResult WelchT(const SampleSummary& a, const SampleSummary& b);

// Regularized incomplete beta I_x(a, b), continued fraction evaluated with
// the modified Lentz method.
double RegularizedIncompleteBeta(double a, double b, double x);

// P(T > t) for Student's t with df degrees of freedom. Throws DataError for
// df <= 0 or a NaN argument.
double StudentTSf(double t, double df);

// P(|T| >= |t|).
double StudentTTwoSided(double t, double df);

}  // namespace chrononer

#endif  // CHRONONER_STATS_WELCH_H_
