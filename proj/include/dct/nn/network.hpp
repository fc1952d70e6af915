// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dct/nn/layers.hpp"
#include "dct/nn/tensor.hpp"

namespace dct::nn {

struct DenseParameters {
  Tensor weights;
  Tensor bias;

  friend bool operator==(const DenseParameters &, const DenseParameters &) = default;
};

struct NetworkSizes {
  std::size_t static_input = 0;  // width of the encoded static attributes
  std::size_t static_dim = 0;    // width of the static representation
  std::size_t hidden = 0;        // LSTM hidden size
  std::size_t daily_input = 0;   // width of one day's feature vector

  std::size_t cooperative_dim() const { return static_dim + hidden; }
  std::size_t head_input_dim() const { return static_dim + cooperative_dim(); }

  friend bool operator==(const NetworkSizes &, const NetworkSizes &) = default;
};

struct NamedTensor {
  std::string name;
  Tensor *tensor;
};

struct ConstNamedTensor {
  std::string name;
  const Tensor *tensor;
};

/// Every trainable tensor of the tracking network:
///   static encoder   S = tanh(W x_static + b)
///   LSTM             h_t over the daily features
///   attention        alpha over V_t = [S; h_t]
///   success head     logits over [S; sum_t alpha_t V_t]
///   emotion head     logits over each V_t
struct NetworkParameters {
  DenseParameters static_encoder;
  LstmParameters lstm;
  AttentionParameters attention;
  DenseParameters success_head;
  DenseParameters emotion_head;

  /// All tensors in a fixed order with dotted names, e.g.
  /// "lstm.forget_gate.recurrent".
  std::vector<NamedTensor> named();
  std::vector<ConstNamedTensor> named() const;

  NetworkSizes sizes() const;
  std::size_t parameter_count() const;

  friend bool operator==(const NetworkParameters &, const NetworkParameters &) = default;
};

/// Gradients mirror the parameter layout tensor for tensor.
using GradientBundle = NetworkParameters;

NetworkParameters zero_network(const NetworkSizes &sizes);

/// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)) for every weight
/// tensor, zero biases except the forget gate bias which starts at 1.
NetworkParameters initialize_network(const NetworkSizes &sizes, std::uint64_t seed);

/// Throws unless every tensor has the shape implied by `sizes`.
void check_shapes(const NetworkParameters &params, const NetworkSizes &sizes);

void add_scaled(NetworkParameters &target, const NetworkParameters &source, double scale);
void scale(NetworkParameters &target, double factor);
double l2_norm(const NetworkParameters &params);

/// Intermediates of one pass over a whole sequence.
struct ForwardRecord {
  Vector static_input;
  Vector static_repr;
  std::vector<Vector> daily_inputs;
  std::vector<LstmState> states;  // states[t] is the state after day t
  std::vector<LstmStepTrace> traces;
  std::vector<Vector> cooperative;  // V_t = [static_repr; hidden_t]
  Vector scores;                    // tanh attention scores
  Vector alpha;
  Vector pooled;
  Vector head_input;  // [static_repr; pooled]
  std::array<double, 2> success_logits{};
  Probabilities success_probs{};
  std::vector<std::array<double, 2>> emotion_logits;
  std::vector<Probabilities> emotion_probs;
};

/// Output of the attention and heads for one prefix of the sequence.
struct PrefixPrediction {
  Vector alpha;
  Probabilities success_probs{};
};

/// The encoder and LSTM are causal, so prefix predictions reuse one
/// recurrent pass; only the attention pooling and success head are redone.
struct SequenceEncoding {
  Vector static_repr;
  std::vector<Vector> cooperative;
};

SequenceEncoding encode_sequence(std::span<const double> static_input,
                                 std::span<const Vector> daily_inputs,
                                 const NetworkParameters &params);

/// Attention and success head over the first `length` cooperative vectors.
PrefixPrediction predict_prefix(const SequenceEncoding &encoding, std::size_t length,
                                const NetworkParameters &params);

Probabilities predict_emotion(std::span<const double> cooperative,
                              const NetworkParameters &params);

ForwardRecord forward_record(std::span<const double> static_input,
                             std::span<const Vector> daily_inputs,
                             const NetworkParameters &params);

/// dLoss/dlogits for the success head and for each day's emotion head.
struct UpstreamGradient {
  std::array<double, 2> success{};
  std::vector<std::array<double, 2>> emotion;
};

/// Backpropagation through the heads, attention, LSTM (through time) and
/// static encoder.
GradientBundle backward(const ForwardRecord &record, const NetworkParameters &params,
                        const UpstreamGradient &upstream);

struct LossTargets {
  std::size_t success_label = 0;
  /// Per day class label for the emotion head; nullopt excludes the day.
  std::vector<std::optional<std::size_t>> emotion_labels;
  double aux_weight = 0.0;
};

struct LossValue {
  double loss = 0.0;
  UpstreamGradient upstream;
};

/// CE(success) + aux_weight * mean over labelled days of CE(emotion_t).
LossValue sequence_loss(const ForwardRecord &record, const LossTargets &targets);

}  // namespace dct::nn
