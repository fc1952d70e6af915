// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "dct/nn/tensor.hpp"

namespace dct::nn {

using Probabilities = std::array<double, 2>;

enum class Activation { linear, tanh };

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// y = W x + b, optionally squashed by tanh.
Vector dense(std::span<const double> x, const Tensor &weights, const Tensor &bias,
             Activation activation = Activation::linear);

/// Weights feeding one LSTM gate: input (hidden x input), recurrent
/// (hidden x hidden) and bias (hidden).
struct GateParameters {
  Tensor input;
  Tensor recurrent;
  Tensor bias;

  friend bool operator==(const GateParameters &, const GateParameters &) = default;
};

struct LstmParameters {
  GateParameters input_gate;
  GateParameters forget_gate;
  GateParameters candidate;
  GateParameters output_gate;

  std::size_t input_size() const { return input_gate.input.cols(); }
  std::size_t hidden_size() const { return input_gate.input.rows(); }

  friend bool operator==(const LstmParameters &, const LstmParameters &) = default;
};

struct LstmState {
  Vector hidden;
  Vector cell;

  static LstmState zeros(std::size_t hidden_size) {
    return {Vector(hidden_size, 0.0), Vector(hidden_size, 0.0)};
  }
};

/// Gate activations of one step, kept for backpropagation.
struct LstmStepTrace {
  Vector input_gate;
  Vector forget_gate;
  Vector candidate;
  Vector output_gate;
  Vector cell_tanh;
};

/// One LSTM update:
///   i = sigmoid(W_i x + U_i h + b_i), f and o likewise,
///   g = tanh(W_c x + U_c h + b_c),
///   c' = f * c + i * g,  h' = o * tanh(c').
LstmState lstm_step(std::span<const double> input, const LstmState &previous,
                    const LstmParameters &params, LstmStepTrace *trace = nullptr);

/// Scoring vector w (length of V_i) and scalar bias (shape {1}).
struct AttentionParameters {
  Tensor weights;
  Tensor bias;

  friend bool operator==(const AttentionParameters &, const AttentionParameters &) = default;
};

/// tanh(V_i . w + b) for every row.
Vector attention_scores(std::span<const Vector> rows, const AttentionParameters &params);

/// Softmax over the tanh scores; sums to one.
Vector attention_weights(std::span<const Vector> rows, const AttentionParameters &params);

/// Max-shifted softmax over arbitrary scores.
Vector softmax(std::span<const double> scores);

/// sum_i alpha_i V_i
Vector attention_pool(std::span<const double> alpha, std::span<const Vector> rows);

Probabilities softmax_binary(const std::array<double, 2> &logits);

/// -log p[label] with p clamped to [1e-12, 1 - 1e-12].
double cross_entropy(const Probabilities &p, std::size_t label);

}  // namespace dct::nn
