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

#ifndef CHRONONER_EMBEDDINGS_LSTM_H_
#define CHRONONER_EMBEDDINGS_LSTM_H_

#include <Eigen/Dense>

#include "common/checkpoint.h"
#include "common/random.h"

namespace chrononer {

// Single-layer LSTM. Gate rows are ordered input, forget, candidate, output.
//
// Sequences are processed as a batch laid out step-major: column t*batch+b
// holds step t of sequence b. Shorter sequences are right-padded; padding
// never feeds back into earlier steps, so valid outputs are unaffected.
struct LstmLayer {
  Eigen::MatrixXd wx;  // 4h x input
  Eigen::MatrixXd wh;  // 4h x h
  Eigen::MatrixXd b;   // 4h x 1

  int input_size() const { return static_cast<int>(wx.cols()); }
  int hidden_size() const { return static_cast<int>(wh.cols()); }

  void Init(int input, int hidden, Rng& rng, double scale);

  void Serialize(PayloadWriter& w) const;
  static LstmLayer Deserialize(PayloadReader& r);
};

struct LstmState {
  Eigen::MatrixXd h;  // h x batch
  Eigen::MatrixXd c;

  static LstmState Zero(int hidden, int batch) {
    return {Eigen::MatrixXd::Zero(hidden, batch), Eigen::MatrixXd::Zero(hidden, batch)};
  }
};

// Activations kept for the backward pass.
struct LstmTrace {
  int steps = 0;
  int batch = 0;
  LstmState initial;
  Eigen::MatrixXd x;       // input x steps*batch
  Eigen::MatrixXd gates;   // 4h x steps*batch, post-activation
  Eigen::MatrixXd c;       // h x steps*batch
  Eigen::MatrixXd tanh_c;  // h x steps*batch
  Eigen::MatrixXd h;       // h x steps*batch, the layer output

  LstmState Final() const;
};

struct LstmGrads {
  Eigen::MatrixXd wx, wh, b;

  static LstmGrads ZeroLike(const LstmLayer& layer);
};

void LstmForward(const LstmLayer& layer, const Eigen::MatrixXd& x, int steps, int batch,
                 const LstmState& initial, LstmTrace* trace);

// `dh` is the loss gradient w.r.t. trace.h. Gradients are accumulated into
// `grads`; `dx`, when non-null, receives the gradient w.r.t. the inputs.
void LstmBackward(const LstmLayer& layer, const LstmTrace& trace, const Eigen::MatrixXd& dh,
                  LstmGrads* grads, Eigen::MatrixXd* dx);

}  // namespace chrononer

#endif  // CHRONONER_EMBEDDINGS_LSTM_H_
