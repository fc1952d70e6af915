// SPDX-License-Identifier: Apache-2.0
#include "dct/nn/network.hpp"

#include <cmath>
#include <random>

#include "dct/error.hpp"

namespace dct::nn {

namespace {

Vector concat(std::span<const double> a, std::span<const double> b) {
  Vector out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::array<double, 2> to_pair(const Vector &v) { return {v[0], v[1]}; }

// dW += g (x)^T, db += g, returns W^T g when wanted.
void accumulate_dense(const Tensor &weights, std::span<const double> x,
                      std::span<const double> grad_out, Tensor &grad_weights,
                      Tensor &grad_bias, Vector *grad_input) {
  const std::size_t rows = weights.rows();
  const std::size_t cols = weights.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    const double g = grad_out[r];
    grad_bias[r] += g;
    if (g == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) grad_weights(r, c) += g * x[c];
  }
  if (grad_input) {
    grad_input->assign(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) (*grad_input)[c] += weights(r, c) * grad_out[r];
  }
}

void accumulate_gate(const GateParameters &gate, std::span<const double> x,
                     std::span<const double> h_prev, std::span<const double> grad_pre,
                     GateParameters &grad, Vector &grad_h_prev) {
  const std::size_t hidden = gate.bias.size();
  for (std::size_t r = 0; r < hidden; ++r) {
    const double g = grad_pre[r];
    grad.bias[r] += g;
    for (std::size_t c = 0; c < x.size(); ++c) grad.input(r, c) += g * x[c];
    for (std::size_t c = 0; c < hidden; ++c) {
      grad.recurrent(r, c) += g * h_prev[c];
      grad_h_prev[c] += gate.recurrent(r, c) * g;
    }
  }
}

GateParameters zero_gate(std::size_t hidden, std::size_t input) {
  return {Tensor({hidden, input}), Tensor({hidden, hidden}), Tensor({hidden})};
}

void check(bool ok, const std::string &what) {
  if (!ok) throw Error("network shape mismatch: " + what);
}

}  // namespace

std::vector<NamedTensor> NetworkParameters::named() {
  return {
      {"static_encoder.weights", &static_encoder.weights},
      {"static_encoder.bias", &static_encoder.bias},
      {"lstm.input_gate.input", &lstm.input_gate.input},
      {"lstm.input_gate.recurrent", &lstm.input_gate.recurrent},
      {"lstm.input_gate.bias", &lstm.input_gate.bias},
      {"lstm.forget_gate.input", &lstm.forget_gate.input},
      {"lstm.forget_gate.recurrent", &lstm.forget_gate.recurrent},
      {"lstm.forget_gate.bias", &lstm.forget_gate.bias},
      {"lstm.candidate.input", &lstm.candidate.input},
      {"lstm.candidate.recurrent", &lstm.candidate.recurrent},
      {"lstm.candidate.bias", &lstm.candidate.bias},
      {"lstm.output_gate.input", &lstm.output_gate.input},
      {"lstm.output_gate.recurrent", &lstm.output_gate.recurrent},
      {"lstm.output_gate.bias", &lstm.output_gate.bias},
      {"attention.weights", &attention.weights},
      {"attention.bias", &attention.bias},
      {"success_head.weights", &success_head.weights},
      {"success_head.bias", &success_head.bias},
      {"emotion_head.weights", &emotion_head.weights},
      {"emotion_head.bias", &emotion_head.bias},
  };
}

std::vector<ConstNamedTensor> NetworkParameters::named() const {
  std::vector<ConstNamedTensor> out;
  for (auto &[name, tensor] : const_cast<NetworkParameters *>(this)->named())
    out.push_back({name, tensor});
  return out;
}

NetworkSizes NetworkParameters::sizes() const {
  return {static_encoder.weights.cols(), static_encoder.weights.rows(), lstm.hidden_size(),
          lstm.input_size()};
}

std::size_t NetworkParameters::parameter_count() const {
  std::size_t n = 0;
  for (const auto &entry : named()) n += entry.tensor->size();
  return n;
}

NetworkParameters zero_network(const NetworkSizes &s) {
  NetworkParameters p;
  p.static_encoder = {Tensor({s.static_dim, s.static_input}), Tensor({s.static_dim})};
  p.lstm.input_gate = zero_gate(s.hidden, s.daily_input);
  p.lstm.forget_gate = zero_gate(s.hidden, s.daily_input);
  p.lstm.candidate = zero_gate(s.hidden, s.daily_input);
  p.lstm.output_gate = zero_gate(s.hidden, s.daily_input);
  p.attention = {Tensor({s.cooperative_dim()}), Tensor({1})};
  p.success_head = {Tensor({2, s.head_input_dim()}), Tensor({2})};
  p.emotion_head = {Tensor({2, s.cooperative_dim()}), Tensor({2})};
  return p;
}

NetworkParameters initialize_network(const NetworkSizes &sizes, std::uint64_t seed) {
  NetworkParameters p = zero_network(sizes);
  std::mt19937_64 rng(seed);
  for (auto &[name, tensor] : p.named()) {
    if (name.ends_with(".bias")) continue;
    const double fan_out = static_cast<double>(tensor->rank() == 2 ? tensor->rows() : 1);
    const double fan_in = static_cast<double>(tensor->rank() == 2 ? tensor->cols() : tensor->size());
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double &v : tensor->values()) v = dist(rng);
  }
  p.lstm.forget_gate.bias.fill(1.0);
  return p;
}

void check_shapes(const NetworkParameters &params, const NetworkSizes &sizes) {
  const NetworkParameters expected = zero_network(sizes);
  const auto want = expected.named();
  const auto have = params.named();
  for (std::size_t i = 0; i < want.size(); ++i)
    check(want[i].tensor->shape() == have[i].tensor->shape(), have[i].name);
}

void add_scaled(NetworkParameters &target, const NetworkParameters &source, double factor) {
  auto dst = target.named();
  const auto src = source.named();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    check(dst[i].tensor->same_shape(*src[i].tensor), dst[i].name);
    auto out = dst[i].tensor->values();
    auto in = src[i].tensor->values();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += factor * in[k];
  }
}

void scale(NetworkParameters &target, double factor) {
  for (auto &entry : target.named())
    for (double &v : entry.tensor->values()) v *= factor;
}

double l2_norm(const NetworkParameters &params) {
  double sum = 0.0;
  for (const auto &entry : params.named())
    for (double v : entry.tensor->values()) sum += v * v;
  return std::sqrt(sum);
}

SequenceEncoding encode_sequence(std::span<const double> static_input,
                                 std::span<const Vector> daily_inputs,
                                 const NetworkParameters &params) {
  SequenceEncoding enc;
  enc.static_repr = dense(static_input, params.static_encoder.weights,
                          params.static_encoder.bias, Activation::tanh);
  LstmState state = LstmState::zeros(params.lstm.hidden_size());
  enc.cooperative.reserve(daily_inputs.size());
  for (const auto &x : daily_inputs) {
    state = lstm_step(x, state, params.lstm);
    enc.cooperative.push_back(concat(enc.static_repr, state.hidden));
  }
  return enc;
}

PrefixPrediction predict_prefix(const SequenceEncoding &encoding, std::size_t length,
                                const NetworkParameters &params) {
  if (length == 0 || length > encoding.cooperative.size())
    throw Error("predict_prefix: prefix length out of range");
  std::span<const Vector> rows(encoding.cooperative.data(), length);
  PrefixPrediction out;
  out.alpha = attention_weights(rows, params.attention);
  const Vector pooled = attention_pool(out.alpha, rows);
  const Vector head_input = concat(encoding.static_repr, pooled);
  const Vector logits = dense(head_input, params.success_head.weights, params.success_head.bias);
  out.success_probs = softmax_binary(to_pair(logits));
  return out;
}

Probabilities predict_emotion(std::span<const double> cooperative,
                              const NetworkParameters &params) {
  const Vector logits = dense(cooperative, params.emotion_head.weights, params.emotion_head.bias);
  return softmax_binary(to_pair(logits));
}

ForwardRecord forward_record(std::span<const double> static_input,
                             std::span<const Vector> daily_inputs,
                             const NetworkParameters &params) {
  if (daily_inputs.empty()) throw Error("empty prefix");
  ForwardRecord rec;
  rec.static_input.assign(static_input.begin(), static_input.end());
  rec.daily_inputs.assign(daily_inputs.begin(), daily_inputs.end());
  rec.static_repr = dense(static_input, params.static_encoder.weights,
                          params.static_encoder.bias, Activation::tanh);

  const std::size_t n = daily_inputs.size();
  LstmState state = LstmState::zeros(params.lstm.hidden_size());
  rec.states.reserve(n);
  rec.traces.resize(n);
  rec.cooperative.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    state = lstm_step(daily_inputs[t], state, params.lstm, &rec.traces[t]);
    rec.states.push_back(state);
    rec.cooperative.push_back(concat(rec.static_repr, state.hidden));
  }

  rec.scores = attention_scores(rec.cooperative, params.attention);
  rec.alpha = softmax(rec.scores);
  rec.pooled = attention_pool(rec.alpha, rec.cooperative);
  rec.head_input = concat(rec.static_repr, rec.pooled);
  rec.success_logits =
      to_pair(dense(rec.head_input, params.success_head.weights, params.success_head.bias));
  rec.success_probs = softmax_binary(rec.success_logits);

  rec.emotion_logits.reserve(n);
  rec.emotion_probs.reserve(n);
  for (const auto &v : rec.cooperative) {
    rec.emotion_logits.push_back(
        to_pair(dense(v, params.emotion_head.weights, params.emotion_head.bias)));
    rec.emotion_probs.push_back(softmax_binary(rec.emotion_logits.back()));
  }
  return rec;
}

GradientBundle backward(const ForwardRecord &rec, const NetworkParameters &params,
                        const UpstreamGradient &upstream) {
  const NetworkSizes sizes = params.sizes();
  const std::size_t n = rec.cooperative.size();
  check(rec.static_repr.size() == sizes.static_dim, "record static representation");
  check(rec.traces.size() == n && rec.states.size() == n && rec.daily_inputs.size() == n,
        "record sequence length");
  check(upstream.emotion.empty() || upstream.emotion.size() == n, "emotion gradient length");
  for (const auto &x : rec.daily_inputs) check(x.size() == sizes.daily_input, "record daily input");
  check(rec.static_input.size() == sizes.static_input, "record static input");
  for (const auto &v : rec.cooperative) check(v.size() == sizes.cooperative_dim(), "record state");
  check(rec.head_input.size() == sizes.head_input_dim(), "record head input");

  const std::size_t sd = sizes.static_dim;
  const std::size_t hd = sizes.hidden;
  GradientBundle grad = zero_network(sizes);

  Vector d_static(sd, 0.0);
  std::vector<Vector> d_coop(n, Vector(sd + hd, 0.0));

  // Success head over [static_repr; pooled].
  Vector d_head_input;
  accumulate_dense(params.success_head.weights, rec.head_input, upstream.success,
                   grad.success_head.weights, grad.success_head.bias, &d_head_input);
  for (std::size_t k = 0; k < sd; ++k) d_static[k] += d_head_input[k];
  const std::span<const double> d_pooled(d_head_input.data() + sd, sd + hd);

  // Pooling: pooled = sum_t alpha_t V_t.
  Vector d_alpha(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double dot = 0.0;
    for (std::size_t k = 0; k < sd + hd; ++k) {
      d_coop[t][k] += rec.alpha[t] * d_pooled[k];
      dot += d_pooled[k] * rec.cooperative[t][k];
    }
    d_alpha[t] = dot;
  }

  // Softmax over scores, then scores = tanh(V_t . w + b).
  double weighted = 0.0;
  for (std::size_t t = 0; t < n; ++t) weighted += rec.alpha[t] * d_alpha[t];
  for (std::size_t t = 0; t < n; ++t) {
    const double d_score = rec.alpha[t] * (d_alpha[t] - weighted);
    const double d_pre = d_score * (1.0 - rec.scores[t] * rec.scores[t]);
    grad.attention.bias[0] += d_pre;
    for (std::size_t k = 0; k < sd + hd; ++k) {
      grad.attention.weights[k] += d_pre * rec.cooperative[t][k];
      d_coop[t][k] += d_pre * params.attention.weights[k];
    }
  }

  // Emotion head on every V_t.
  if (!upstream.emotion.empty()) {
    Vector d_v;
    for (std::size_t t = 0; t < n; ++t) {
      accumulate_dense(params.emotion_head.weights, rec.cooperative[t], upstream.emotion[t],
                       grad.emotion_head.weights, grad.emotion_head.bias, &d_v);
      for (std::size_t k = 0; k < sd + hd; ++k) d_coop[t][k] += d_v[k];
    }
  }

  // Split V_t = [static_repr; hidden_t].
  std::vector<Vector> d_hidden(n, Vector(hd, 0.0));
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = 0; k < sd; ++k) d_static[k] += d_coop[t][k];
    for (std::size_t k = 0; k < hd; ++k) d_hidden[t][k] = d_coop[t][sd + k];
  }

  // Backpropagation through time.
  Vector dh_next(hd, 0.0);
  Vector dc_next(hd, 0.0);
  const Vector zeros(hd, 0.0);
  Vector d_i(hd), d_f(hd), d_g(hd), d_o(hd);
  for (std::size_t step = n; step-- > 0;) {
    const LstmStepTrace &tr = rec.traces[step];
    const Vector &c_prev = step == 0 ? zeros : rec.states[step - 1].cell;
    const Vector &h_prev = step == 0 ? zeros : rec.states[step - 1].hidden;
    for (std::size_t k = 0; k < hd; ++k) {
      const double dh = d_hidden[step][k] + dh_next[k];
      const double dc =
          dc_next[k] + dh * tr.output_gate[k] * (1.0 - tr.cell_tanh[k] * tr.cell_tanh[k]);
      const double i = tr.input_gate[k], f = tr.forget_gate[k];
      const double g = tr.candidate[k], o = tr.output_gate[k];
      d_o[k] = dh * tr.cell_tanh[k] * o * (1.0 - o);
      d_i[k] = dc * g * i * (1.0 - i);
      d_f[k] = dc * c_prev[k] * f * (1.0 - f);
      d_g[k] = dc * i * (1.0 - g * g);
      dc_next[k] = dc * f;
    }
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    const Vector &x = rec.daily_inputs[step];
    accumulate_gate(params.lstm.input_gate, x, h_prev, d_i, grad.lstm.input_gate, dh_next);
    accumulate_gate(params.lstm.forget_gate, x, h_prev, d_f, grad.lstm.forget_gate, dh_next);
    accumulate_gate(params.lstm.candidate, x, h_prev, d_g, grad.lstm.candidate, dh_next);
    accumulate_gate(params.lstm.output_gate, x, h_prev, d_o, grad.lstm.output_gate, dh_next);
  }

  // Static encoder, tanh activation.
  Vector d_static_pre(sd);
  for (std::size_t k = 0; k < sd; ++k)
    d_static_pre[k] = d_static[k] * (1.0 - rec.static_repr[k] * rec.static_repr[k]);
  accumulate_dense(params.static_encoder.weights, rec.static_input, d_static_pre,
                   grad.static_encoder.weights, grad.static_encoder.bias, nullptr);
  return grad;
}

LossValue sequence_loss(const ForwardRecord &rec, const LossTargets &targets) {
  const std::size_t n = rec.cooperative.size();
  if (targets.success_label > 1) throw Error("sequence_loss: invalid success label");
  if (!targets.emotion_labels.empty() && targets.emotion_labels.size() != n)
    throw Error("sequence_loss: emotion labels do not match the sequence length");

  LossValue out;
  out.loss = cross_entropy(rec.success_probs, targets.success_label);
  for (std::size_t c = 0; c < 2; ++c)
    out.upstream.success[c] =
        rec.success_probs[c] - (c == targets.success_label ? 1.0 : 0.0);

  std::size_t labelled = 0;
  for (const auto &label : targets.emotion_labels)
    if (label) ++labelled;
  if (labelled == 0 || targets.aux_weight == 0.0) return out;

  const double w = targets.aux_weight / static_cast<double>(labelled);
  out.upstream.emotion.assign(n, {0.0, 0.0});
  for (std::size_t t = 0; t < n; ++t) {
    const auto &label = targets.emotion_labels[t];
    if (!label) continue;
    if (*label > 1) throw Error("sequence_loss: invalid emotion label");
    out.loss += w * cross_entropy(rec.emotion_probs[t], *label);
    for (std::size_t c = 0; c < 2; ++c)
      out.upstream.emotion[t][c] = w * (rec.emotion_probs[t][c] - (c == *label ? 1.0 : 0.0));
  }
  return out;
}

}  // namespace dct::nn
