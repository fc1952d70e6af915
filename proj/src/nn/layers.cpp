// SPDX-License-Identifier: Apache-2.0
#include "dct/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dct/error.hpp"

namespace dct::nn {

namespace {

void require(bool ok, const char *what) {
  if (!ok) throw Error(std::string("shape mismatch: ") + what);
}

void check_gate(const GateParameters &gate, std::size_t hidden, std::size_t input) {
  require(gate.input.rank() == 2 && gate.input.rows() == hidden && gate.input.cols() == input,
          "lstm input weights");
  require(gate.recurrent.rank() == 2 && gate.recurrent.rows() == hidden &&
              gate.recurrent.cols() == hidden,
          "lstm recurrent weights");
  require(gate.bias.rank() == 1 && gate.bias.size() == hidden, "lstm bias");
}

// W x + U h + b for one gate.
Vector gate_preactivation(const GateParameters &gate, std::span<const double> x,
                          std::span<const double> h) {
  const std::size_t hidden = gate.bias.size();
  Vector out(hidden);
  for (std::size_t r = 0; r < hidden; ++r) {
    double acc = gate.bias[r];
    for (std::size_t c = 0; c < x.size(); ++c) acc += gate.input(r, c) * x[c];
    for (std::size_t c = 0; c < h.size(); ++c) acc += gate.recurrent(r, c) * h[c];
    out[r] = acc;
  }
  return out;
}

}  // namespace

Vector dense(std::span<const double> x, const Tensor &weights, const Tensor &bias,
             Activation activation) {
  require(weights.rank() == 2 && weights.cols() == x.size(), "dense weights vs input");
  require(bias.rank() == 1 && bias.size() == weights.rows(), "dense bias vs weights");
  Vector y(weights.rows());
  for (std::size_t r = 0; r < weights.rows(); ++r) {
    double acc = bias[r];
    for (std::size_t c = 0; c < x.size(); ++c) acc += weights(r, c) * x[c];
    y[r] = activation == Activation::tanh ? std::tanh(acc) : acc;
  }
  return y;
}

LstmState lstm_step(std::span<const double> input, const LstmState &previous,
                    const LstmParameters &params, LstmStepTrace *trace) {
  const std::size_t hidden = params.hidden_size();
  const std::size_t in = params.input_size();
  require(input.size() == in, "lstm input width");
  require(previous.hidden.size() == hidden && previous.cell.size() == hidden,
          "lstm previous state");
  for (const auto *gate : {&params.input_gate, &params.forget_gate, &params.candidate,
                           &params.output_gate})
    check_gate(*gate, hidden, in);

  Vector i = gate_preactivation(params.input_gate, input, previous.hidden);
  Vector f = gate_preactivation(params.forget_gate, input, previous.hidden);
  Vector g = gate_preactivation(params.candidate, input, previous.hidden);
  Vector o = gate_preactivation(params.output_gate, input, previous.hidden);

  LstmState next{Vector(hidden), Vector(hidden)};
  Vector cell_tanh(hidden);
  for (std::size_t k = 0; k < hidden; ++k) {
    i[k] = sigmoid(i[k]);
    f[k] = sigmoid(f[k]);
    g[k] = std::tanh(g[k]);
    o[k] = sigmoid(o[k]);
    next.cell[k] = f[k] * previous.cell[k] + i[k] * g[k];
    cell_tanh[k] = std::tanh(next.cell[k]);
    next.hidden[k] = o[k] * cell_tanh[k];
  }

  if (trace) {
    trace->input_gate = std::move(i);
    trace->forget_gate = std::move(f);
    trace->candidate = std::move(g);
    trace->output_gate = std::move(o);
    trace->cell_tanh = std::move(cell_tanh);
  }
  return next;
}

Vector attention_scores(std::span<const Vector> rows, const AttentionParameters &params) {
  require(params.bias.size() == 1, "attention bias must be scalar");
  Vector scores(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == params.weights.size(), "attention row width");
    double acc = 0.0;
    for (std::size_t k = 0; k < rows[i].size(); ++k) acc += rows[i][k] * params.weights[k];
    scores[i] = std::tanh(acc + params.bias[0]);
  }
  return scores;
}

Vector softmax(std::span<const double> scores) {
  if (scores.empty()) throw Error("softmax of an empty vector");
  const double top = *std::max_element(scores.begin(), scores.end());
  Vector out(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - top);
    total += out[i];
  }
  for (double &v : out) v /= total;
  return out;
}

Vector attention_weights(std::span<const Vector> rows, const AttentionParameters &params) {
  if (rows.empty()) throw Error("attention over an empty sequence");
  const Vector scores = attention_scores(rows, params);
  return softmax(scores);
}

Vector attention_pool(std::span<const double> alpha, std::span<const Vector> rows) {
  require(alpha.size() == rows.size(), "attention weights vs rows");
  if (rows.empty()) throw Error("attention pool over an empty sequence");
  Vector pooled(rows[0].size(), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == pooled.size(), "attention row width");
    for (std::size_t k = 0; k < pooled.size(); ++k) pooled[k] += alpha[i] * rows[i][k];
  }
  return pooled;
}

Probabilities softmax_binary(const std::array<double, 2> &logits) {
  const double top = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - top);
  const double e1 = std::exp(logits[1] - top);
  const double total = e0 + e1;
  return {e0 / total, e1 / total};
}

double cross_entropy(const Probabilities &p, std::size_t label) {
  if (label > 1) throw Error("cross_entropy: label must be 0 or 1");
  constexpr double kFloor = 1e-12;
  return -std::log(std::clamp(p[label], kFloor, 1.0 - kFloor));
}

}  // namespace dct::nn
