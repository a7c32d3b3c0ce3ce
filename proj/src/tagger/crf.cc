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

#include "tagger/crf.h"

#include <cmath>
#include <limits>
#include <string>

#include "common/error.h"

namespace chrononer {
namespace {

void CheckShapes(const Eigen::MatrixXd& emissions, const Eigen::MatrixXd& transitions) {
  const auto k = emissions.cols();
  if (k < 1 || transitions.rows() != k + 2 || transitions.cols() != k + 2) {
    throw DataError("CRF transition matrix must be (K+2)x(K+2) for K emission columns");
  }
}

void CheckPath(const Eigen::MatrixXd& emissions, std::span<const int> tags) {
  if (static_cast<Eigen::Index>(tags.size()) != emissions.rows()) {
    throw DataError("tag path length " + std::to_string(tags.size()) +
                    " does not match sequence length " + std::to_string(emissions.rows()));
  }
  for (int t : tags) {
    if (t < 0 || t >= emissions.cols()) throw DataError("tag index out of range");
  }
}

double LogSumExp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

// alpha(t, j): log-sum of scores of all prefixes ending in tag j at t.
Eigen::MatrixXd ForwardTable(const Eigen::MatrixXd& e, const Eigen::MatrixXd& tr) {
  const int n = static_cast<int>(e.rows());
  const int k = static_cast<int>(e.cols());
  Eigen::MatrixXd alpha(n, k);
  for (int j = 0; j < k; ++j) alpha(0, j) = tr(CrfStart(k), j) + e(0, j);
  Eigen::VectorXd tmp(k);
  for (int t = 1; t < n; ++t) {
    for (int j = 0; j < k; ++j) {
      for (int i = 0; i < k; ++i) tmp(i) = alpha(t - 1, i) + tr(i, j);
      alpha(t, j) = LogSumExp(tmp) + e(t, j);
    }
  }
  return alpha;
}

// beta(t, i): log-sum of scores of all suffixes after tag i at t, including STOP.
Eigen::MatrixXd BackwardTable(const Eigen::MatrixXd& e, const Eigen::MatrixXd& tr) {
  const int n = static_cast<int>(e.rows());
  const int k = static_cast<int>(e.cols());
  Eigen::MatrixXd beta(n, k);
  for (int i = 0; i < k; ++i) beta(n - 1, i) = tr(i, CrfStop(k));
  Eigen::VectorXd tmp(k);
  for (int t = n - 2; t >= 0; --t) {
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) tmp(j) = tr(i, j) + e(t + 1, j) + beta(t + 1, j);
      beta(t, i) = LogSumExp(tmp);
    }
  }
  return beta;
}

}  // namespace

double CrfScore(const Eigen::MatrixXd& emissions, const Eigen::MatrixXd& transitions,
                std::span<const int> tags) {
  CheckShapes(emissions, transitions);
  CheckPath(emissions, tags);
  const int k = static_cast<int>(emissions.cols());
  const size_t n = tags.size();
  if (n == 0) throw DataError("CRF score needs at least one position");
  double s = transitions(CrfStart(k), tags[0]);
  for (size_t t = 0; t < n; ++t) {
    s += emissions(static_cast<Eigen::Index>(t), tags[t]);
    if (t > 0) s += transitions(tags[t - 1], tags[t]);
  }
  return s + transitions(tags[n - 1], CrfStop(k));
}

double CrfLogPartition(const Eigen::MatrixXd& emissions, const Eigen::MatrixXd& transitions) {
  CheckShapes(emissions, transitions);
  if (emissions.rows() == 0) throw DataError("CRF partition needs at least one position");
  const int k = static_cast<int>(emissions.cols());
  const Eigen::MatrixXd alpha = ForwardTable(emissions, transitions);
  Eigen::VectorXd last(k);
  for (int i = 0; i < k; ++i) last(i) = alpha(emissions.rows() - 1, i) + transitions(i, CrfStop(k));
  return LogSumExp(last);
}

ViterbiResult ViterbiDecode(const Eigen::MatrixXd& emissions, const Eigen::MatrixXd& transitions) {
  CheckShapes(emissions, transitions);
  const int n = static_cast<int>(emissions.rows());
  const int k = static_cast<int>(emissions.cols());
  ViterbiResult out;
  if (n == 0) return out;
  Eigen::MatrixXd best(n, k);
  Eigen::MatrixXi back(n, k);
  for (int j = 0; j < k; ++j) best(0, j) = transitions(CrfStart(k), j) + emissions(0, j);
  for (int t = 1; t < n; ++t) {
    for (int j = 0; j < k; ++j) {
      int arg = 0;
      double val = best(t - 1, 0) + transitions(0, j);
      for (int i = 1; i < k; ++i) {
        const double cand = best(t - 1, i) + transitions(i, j);
        if (cand > val) {
          val = cand;
          arg = i;
        }
      }
      best(t, j) = val + emissions(t, j);
      back(t, j) = arg;
    }
  }
  int arg = 0;
  double val = best(n - 1, 0) + transitions(0, CrfStop(k));
  for (int i = 1; i < k; ++i) {
    const double cand = best(n - 1, i) + transitions(i, CrfStop(k));
    if (cand > val) {
      val = cand;
      arg = i;
    }
  }
  out.score = val;
  out.tags.assign(n, 0);
  out.tags[n - 1] = arg;
  for (int t = n - 1; t > 0; --t) out.tags[t - 1] = back(t, out.tags[t]);
  return out;
}

double CrfNllLoss(const Eigen::MatrixXd& emissions, const Eigen::MatrixXd& transitions,
                  std::span<const int> gold, Eigen::MatrixXd* d_emissions,
                  Eigen::MatrixXd* d_transitions) {
  CheckShapes(emissions, transitions);
  CheckPath(emissions, gold);
  const int n = static_cast<int>(emissions.rows());
  const int k = static_cast<int>(emissions.cols());
  if (n == 0) throw DataError("CRF loss needs at least one position");
  const Eigen::MatrixXd alpha = ForwardTable(emissions, transitions);
  Eigen::VectorXd last(k);
  for (int i = 0; i < k; ++i) last(i) = alpha(n - 1, i) + transitions(i, CrfStop(k));
  const double log_z = LogSumExp(last);
  const double loss = log_z - CrfScore(emissions, transitions, gold);
  if (d_emissions == nullptr && d_transitions == nullptr) return loss;

  const Eigen::MatrixXd beta = BackwardTable(emissions, transitions);
  // Expected feature counts minus gold counts.
  if (d_emissions != nullptr) {
    for (int t = 0; t < n; ++t) {
      for (int j = 0; j < k; ++j) (*d_emissions)(t, j) += std::exp(alpha(t, j) + beta(t, j) - log_z);
      (*d_emissions)(t, gold[t]) -= 1.0;
    }
  }
  if (d_transitions != nullptr) {
    auto& dt = *d_transitions;
    for (int j = 0; j < k; ++j) {
      dt(CrfStart(k), j) += std::exp(alpha(0, j) + beta(0, j) - log_z);
      dt(j, CrfStop(k)) += std::exp(alpha(n - 1, j) + transitions(j, CrfStop(k)) - log_z);
    }
    for (int t = 1; t < n; ++t) {
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          dt(i, j) += std::exp(alpha(t - 1, i) + transitions(i, j) + emissions(t, j) +
                               beta(t, j) - log_z);
        }
      }
    }
    dt(CrfStart(k), gold[0]) -= 1.0;
    dt(gold[n - 1], CrfStop(k)) -= 1.0;
    for (int t = 1; t < n; ++t) dt(gold[t - 1], gold[t]) -= 1.0;
  }
  return loss;
}

}  // namespace chrononer
