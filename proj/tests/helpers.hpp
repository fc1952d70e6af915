// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dct/features.hpp"
#include "dct/nn/network.hpp"
#include "oracles.hpp"

namespace testing {

inline dct::Campaign make_campaign(const std::string &id, const std::vector<double> &funds,
                                   const std::vector<std::vector<double>> &p_pos = {},
                                   dct::Outcome outcome = dct::Outcome::success,
                                   double goal = 1000.0) {
  dct::Campaign c;
  c.id = id;
  c.outcome = outcome;
  c.attributes[dct::AttributeCategory::other]["goal"] = goal;
  c.attributes[dct::AttributeCategory::other]["duration"] = static_cast<double>(funds.size());
  c.attributes[dct::AttributeCategory::owner]["country"] = std::string("US");
  for (std::size_t t = 0; t < funds.size(); ++t) {
    dct::DailyRecord rec;
    rec.day = static_cast<int>(t + 1);
    rec.funds_received = funds[t];
    if (t < p_pos.size())
      for (double p : p_pos[t]) rec.reviews.push_back({rec.day, "", p});
    c.days.push_back(rec);
  }
  return c;
}

// Small irregular numbers so no two parameters coincide.
inline double hand_value(std::size_t k) { return 0.3 * std::sin(1.7 * static_cast<double>(k) + 0.4); }

inline oracle::Mat hand_matrix(std::size_t rows, std::size_t cols, std::size_t &k) {
  oracle::Mat m(rows, oracle::Vec(cols));
  for (auto &row : m)
    for (auto &v : row) v = hand_value(k++);
  return m;
}

inline oracle::Vec hand_vector(std::size_t n, std::size_t &k) {
  oracle::Vec v(n);
  for (auto &x : v) x = hand_value(k++);
  return v;
}

inline oracle::Gate hand_gate(std::size_t hidden, std::size_t input, std::size_t &k) {
  auto w = hand_matrix(hidden, input, k);
  auto u = hand_matrix(hidden, hidden, k);
  return {w, u, hand_vector(hidden, k)};
}

// static_input=3, static_dim=2, hidden=2, daily_input=3.
inline oracle::Model hand_oracle_model() {
  std::size_t k = 0;
  oracle::Model m;
  m.enc_w = hand_matrix(2, 3, k);
  m.enc_b = hand_vector(2, k);
  m.lstm.i = hand_gate(2, 3, k);
  m.lstm.f = hand_gate(2, 3, k);
  m.lstm.g = hand_gate(2, 3, k);
  m.lstm.o = hand_gate(2, 3, k);
  m.att_w = hand_vector(4, k);
  m.att_b = hand_value(k++);
  m.head_w = hand_matrix(2, 6, k);
  m.head_b = hand_vector(2, k);
  return m;
}

inline dct::nn::Tensor to_tensor(const oracle::Mat &m) {
  std::vector<double> data;
  for (const auto &row : m) data.insert(data.end(), row.begin(), row.end());
  return dct::nn::Tensor({m.size(), m[0].size()}, data);
}

inline dct::nn::Tensor to_tensor(const oracle::Vec &v) { return dct::nn::Tensor({v.size()}, v); }

inline dct::nn::GateParameters to_gate(const oracle::Gate &g) {
  return {to_tensor(g.w), to_tensor(g.u), to_tensor(g.b)};
}

inline dct::nn::NetworkParameters to_network(const oracle::Model &m) {
  auto p = dct::nn::zero_network({3, 2, 2, 3});
  p.static_encoder = {to_tensor(m.enc_w), to_tensor(m.enc_b)};
  p.lstm = {to_gate(m.lstm.i), to_gate(m.lstm.f), to_gate(m.lstm.g), to_gate(m.lstm.o)};
  p.attention = {to_tensor(m.att_w), dct::nn::Tensor({1}, {m.att_b})};
  p.success_head = {to_tensor(m.head_w), to_tensor(m.head_b)};
  return p;
}

inline oracle::Mat to_matrix(const dct::nn::Tensor &t) {
  oracle::Mat m(t.rows(), oracle::Vec(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) m[r][c] = t(r, c);
  return m;
}

inline oracle::Gate to_oracle_gate(const dct::nn::GateParameters &g) {
  return {to_matrix(g.input), to_matrix(g.recurrent), g.bias.data()};
}

inline oracle::Model to_oracle(const dct::nn::NetworkParameters &p) {
  oracle::Model m;
  m.enc_w = to_matrix(p.static_encoder.weights);
  m.enc_b = p.static_encoder.bias.data();
  m.lstm = {to_oracle_gate(p.lstm.input_gate), to_oracle_gate(p.lstm.forget_gate),
            to_oracle_gate(p.lstm.candidate), to_oracle_gate(p.lstm.output_gate)};
  m.att_w = p.attention.weights.data();
  m.att_b = p.attention.bias[0];
  m.head_w = to_matrix(p.success_head.weights);
  m.head_b = p.success_head.bias.data();
  return m;
}

inline const oracle::Vec kHandStatic = {0.2, 0.9, 0.5};
inline const oracle::Mat kHandDays = {{1.0, 0.0, 0.3}, {0.0, 1.0, 0.7}, {0.5, 0.5, 0.1}};

}  // namespace testing
