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

#ifndef CHRONONER_TAGGER_CRF_H_
#define CHRONONER_TAGGER_CRF_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace chrononer {

// Linear-chain CRF over K tags.
//
// Emissions are n x K. The transition matrix is (K+2) x (K+2): entry (i, j)
// scores tag j following tag i, row K is the virtual START tag and column
// K+1 the virtual STOP tag. Other START/STOP entries are unused.
//
// The score of a path y is
//   T(START, y0) + sum_t E(t, y_t) + sum_{t>0} T(y_{t-1}, y_t) + T(y_{n-1}, STOP).

inline int CrfStart(int num_tags) { return num_tags; }
inline int CrfStop(int num_tags) { return num_tags + 1; }

double CrfScore(const Eigen::MatrixXd& emissions, const Eigen::MatrixXd& transitions,
                std::span<const int> tags);

// log sum over all K^n paths of exp(score), by the forward recursion.
double CrfLogPartition(const Eigen::MatrixXd& emissions, const Eigen::MatrixXd& transitions);

struct ViterbiResult {
  std::vector<int> tags;
  double score = 0.0;
};

// Highest-scoring path. Ties go to the lowest tag index, both in the
// backpointers and in the final state.
ViterbiResult ViterbiDecode(const Eigen::MatrixXd& emissions, const Eigen::MatrixXd& transitions);

// log Z - score(gold). When the gradient outputs are non-null they receive
// d loss / d emissions (n x K) and d loss / d transitions ((K+2) x (K+2)),
// added to whatever they hold.
double CrfNllLoss(const Eigen::MatrixXd& emissions, const Eigen::MatrixXd& transitions,
                  std::span<const int> gold, Eigen::MatrixXd* d_emissions = nullptr,
                  Eigen::MatrixXd* d_transitions = nullptr);

}  // namespace chrononer

#endif  // CHRONONER_TAGGER_CRF_H_
