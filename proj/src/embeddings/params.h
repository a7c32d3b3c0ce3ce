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

#ifndef CHRONONER_EMBEDDINGS_PARAMS_H_
#define CHRONONER_EMBEDDINGS_PARAMS_H_

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "common/checkpoint.h"
#include "common/random.h"

namespace chrononer {

// Named views of a model's trainable tensors. Gradients are kept in a
// parallel vector of the same shapes.
using ParameterList = std::vector<std::pair<std::string, Eigen::MatrixXd*>>;
using GradientList = std::vector<Eigen::MatrixXd>;

inline GradientList ZeroGradients(const ParameterList& params) {
  GradientList grads;
  grads.reserve(params.size());
  for (const auto& [name, p] : params) grads.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
  return grads;
}

inline double GlobalNorm(const GradientList& grads) {
  double sq = 0.0;
  for (const auto& g : grads) sq += g.squaredNorm();
  return std::sqrt(sq);
}

// Rescales so the global norm is at most `max_norm`.
inline void ClipByGlobalNorm(GradientList& grads, double max_norm) {
  const double norm = GlobalNorm(grads);
  if (max_norm > 0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& g : grads) g *= scale;
  }
}

inline void SgdStep(const ParameterList& params, const GradientList& grads, double lr) {
  for (size_t i = 0; i < params.size(); ++i) *params[i].second -= lr * grads[i];
}

class Adam {
 public:
  explicit Adam(const ParameterList& params, double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(ZeroGradients(params)),
        v_(ZeroGradients(params)) {}

  void Step(const ParameterList& params, const GradientList& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, t_);
    const double c2 = 1.0 - std::pow(beta2_, t_);
    for (size_t i = 0; i < params.size(); ++i) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i].cwiseProduct(grads[i]);
      params[i].second->array() -=
          lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
    }
  }

 private:
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
  GradientList m_, v_;
};

inline void InitUniform(Eigen::MatrixXd& m, Rng& rng, double scale) {
  double* data = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) data[i] = rng.Uniform(-scale, scale);
}

inline void RoundParameters(const ParameterList& params) {
  for (const auto& [name, p] : params) RoundToFloat(*p);
}

inline bool AllFinite(const ParameterList& params) {
  for (const auto& [name, p] : params) {
    if (!p->allFinite()) return false;
  }
  return true;
}

}  // namespace chrononer

#endif  // CHRONONER_EMBEDDINGS_PARAMS_H_
