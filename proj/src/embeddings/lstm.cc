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

#include "embeddings/lstm.h"

#include "common/error.h"
#include "embeddings/params.h"

namespace chrononer {
namespace {

inline Eigen::ArrayXXd Sigmoid(const Eigen::ArrayXXd& z) { return (1.0 + (-z).exp()).inverse(); }

}  // namespace

void LstmLayer::Init(int input, int hidden, Rng& rng, double scale) {
  wx.resize(4 * hidden, input);
  wh.resize(4 * hidden, hidden);
  b.resize(4 * hidden, 1);
  InitUniform(wx, rng, scale);
  InitUniform(wh, rng, scale);
  InitUniform(b, rng, scale);
}

void LstmLayer::Serialize(PayloadWriter& w) const {
  w.Tensor(wx);
  w.Tensor(wh);
  w.Tensor(b);
}

LstmLayer LstmLayer::Deserialize(PayloadReader& r) {
  LstmLayer l;
  l.wx = r.Tensor();
  l.wh = r.Tensor();
  l.b = r.Tensor();
  const auto h = l.wh.cols();
  if (l.wh.rows() != 4 * h || l.wx.rows() != 4 * h || l.b.rows() != 4 * h || l.b.cols() != 1) {
    throw DataError("checkpoint LSTM tensors have inconsistent shapes");
  }
  return l;
}

LstmState LstmTrace::Final() const {
  if (steps == 0) return initial;
  return {h.rightCols(batch), c.rightCols(batch)};
}

LstmGrads LstmGrads::ZeroLike(const LstmLayer& layer) {
  return {Eigen::MatrixXd::Zero(layer.wx.rows(), layer.wx.cols()),
          Eigen::MatrixXd::Zero(layer.wh.rows(), layer.wh.cols()),
          Eigen::MatrixXd::Zero(layer.b.rows(), 1)};
}

void LstmForward(const LstmLayer& layer, const Eigen::MatrixXd& x, int steps, int batch,
                 const LstmState& initial, LstmTrace* trace) {
  const int hd = layer.hidden_size();
  const Eigen::Index cols = static_cast<Eigen::Index>(steps) * batch;
  trace->steps = steps;
  trace->batch = batch;
  trace->initial = initial;
  trace->x = x;
  trace->gates.noalias() = layer.wx * x;
  trace->gates.colwise() += layer.b.col(0);
  trace->c.resize(hd, cols);
  trace->tanh_c.resize(hd, cols);
  trace->h.resize(hd, cols);
  for (int t = 0; t < steps; ++t) {
    const Eigen::Index off = static_cast<Eigen::Index>(t) * batch;
    auto z = trace->gates.middleCols(off, batch);
    if (t == 0) {
      z.noalias() += layer.wh * initial.h;
    } else {
      z.noalias() += layer.wh * trace->h.middleCols(off - batch, batch);
    }
    z.topRows(2 * hd) = Sigmoid(z.topRows(2 * hd).array()).matrix();
    z.middleRows(2 * hd, hd) = z.middleRows(2 * hd, hd).array().tanh().matrix();
    z.bottomRows(hd) = Sigmoid(z.bottomRows(hd).array()).matrix();
    const auto i = z.topRows(hd).array();
    const auto f = z.middleRows(hd, hd).array();
    const auto g = z.middleRows(2 * hd, hd).array();
    const auto o = z.bottomRows(hd).array();
    if (t == 0) {
      trace->c.middleCols(off, batch) = (f * initial.c.array() + i * g).matrix();
    } else {
      trace->c.middleCols(off, batch) =
          (f * trace->c.middleCols(off - batch, batch).array() + i * g).matrix();
    }
    trace->tanh_c.middleCols(off, batch) = trace->c.middleCols(off, batch).array().tanh().matrix();
    trace->h.middleCols(off, batch) = (o * trace->tanh_c.middleCols(off, batch).array()).matrix();
  }
}

void LstmBackward(const LstmLayer& layer, const LstmTrace& trace, const Eigen::MatrixXd& dh,
                  LstmGrads* grads, Eigen::MatrixXd* dx) {
  const int hd = layer.hidden_size();
  const int batch = trace.batch;
  Eigen::MatrixXd dz(4 * hd, static_cast<Eigen::Index>(trace.steps) * batch);
  Eigen::MatrixXd dh_next = Eigen::MatrixXd::Zero(hd, batch);
  Eigen::ArrayXXd dc_next = Eigen::ArrayXXd::Zero(hd, batch);
  for (int t = trace.steps - 1; t >= 0; --t) {
    const Eigen::Index off = static_cast<Eigen::Index>(t) * batch;
    const auto z = trace.gates.middleCols(off, batch);
    const Eigen::ArrayXXd i = z.topRows(hd).array();
    const Eigen::ArrayXXd f = z.middleRows(hd, hd).array();
    const Eigen::ArrayXXd g = z.middleRows(2 * hd, hd).array();
    const Eigen::ArrayXXd o = z.bottomRows(hd).array();
    const Eigen::ArrayXXd tc = trace.tanh_c.middleCols(off, batch).array();
    const Eigen::ArrayXXd c_prev = t == 0 ? Eigen::ArrayXXd(trace.initial.c.array())
                                          : Eigen::ArrayXXd(trace.c.middleCols(off - batch, batch).array());

    const Eigen::ArrayXXd dht = dh.middleCols(off, batch).array() + dh_next.array();
    const Eigen::ArrayXXd dc = dht * o * (1.0 - tc * tc) + dc_next;
    auto dzt = dz.middleCols(off, batch);
    dzt.topRows(hd) = (dc * g * i * (1.0 - i)).matrix();
    dzt.middleRows(hd, hd) = (dc * c_prev * f * (1.0 - f)).matrix();
    dzt.middleRows(2 * hd, hd) = (dc * i * (1.0 - g * g)).matrix();
    dzt.bottomRows(hd) = (dht * tc * o * (1.0 - o)).matrix();
    dc_next = dc * f;
    if (t == 0) {
      grads->wh.noalias() += dzt * trace.initial.h.transpose();
    } else {
      grads->wh.noalias() += dzt * trace.h.middleCols(off - batch, batch).transpose();
    }
    dh_next.noalias() = layer.wh.transpose() * dzt;
  }
  grads->wx.noalias() += dz * trace.x.transpose();
  grads->b.col(0) += dz.rowwise().sum();
  if (dx != nullptr) dx->noalias() = layer.wx.transpose() * dz;
}

}  // namespace chrononer
