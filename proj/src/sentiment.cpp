// SPDX-License-Identifier: Apache-2.0
#include "dct/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "dct/error.hpp"

namespace dct {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Small symmetric initial weight keyed on the token, independent of where the
// token lands in the vocabulary.
double initial_weight(std::uint64_t seed, std::string_view token) {
  const std::uint64_t bits = splitmix64(seed ^ fnv1a(token));
  const double unit = static_cast<double>(bits >> 11) * 0x1.0p-53;
  return (unit * 2.0 - 1.0) * 0.01;
}

using SparseCounts = std::vector<std::pair<std::size_t, double>>;

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char ch : text) {
    if (std::isspace(ch)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else if (std::isalnum(ch)) {
      current.push_back(static_cast<char>(std::tolower(ch)));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

SentimentModel::SentimentModel(const std::vector<std::string> &tokens,
                               const std::vector<double> &token_weights,
                               double bias, SentimentTrainingMeta meta)
    : meta_(meta) {
  if (tokens.size() != token_weights.size())
    throw Error("sentiment model: vocabulary and weights differ in length");
  weights_.clear();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!vocab_.emplace(tokens[i], i).second)
      throw Error("sentiment model: duplicate token '" + tokens[i] + "'");
    weights_.push_back(token_weights[i]);
  }
  weights_.push_back(bias);
}

std::vector<std::string> SentimentModel::tokens_by_index() const {
  std::vector<std::string> out(vocab_.size());
  for (const auto &[token, index] : vocab_) out[index] = token;
  return out;
}

double SentimentModel::classify(std::string_view text) const {
  double logit = bias();
  for (const auto &token : tokenize(text)) {
    auto it = vocab_.find(token);
    if (it != vocab_.end()) logit += weights_[it->second];
  }
  return sigmoid(logit);
}

SentimentModel train_sentiment(const std::vector<LabeledDocument> &corpus,
                               std::size_t epochs, double learning_rate,
                               std::uint64_t seed) {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw Error("sentiment training: learning rate must be positive");
  if (epochs == 0) throw Error("sentiment training: epochs must be positive");

  std::size_t n_pos = 0;
  for (const auto &doc : corpus)
    if (doc.label == Polarity::positive) ++n_pos;
  if (n_pos == 0 || n_pos == corpus.size()) throw Error("degenerate corpus");

  SentimentModel model;
  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(corpus.size());
  for (const auto &doc : corpus) {
    auto tokens = tokenize(doc.text);
    if (tokens.empty())
      throw Error("sentiment training: document has no tokens: '" + doc.text + "'");
    for (const auto &t : tokens) model.vocab_.emplace(t, 0);
    tokenized.push_back(std::move(tokens));
  }

  // Indices follow lexicographic token order.
  std::size_t next = 0;
  for (auto &[token, index] : model.vocab_) index = next++;

  model.weights_.assign(model.vocab_.size() + 1, 0.0);
  for (const auto &[token, index] : model.vocab_)
    model.weights_[index] = initial_weight(seed, token);

  std::vector<SparseCounts> features;
  features.reserve(tokenized.size());
  for (const auto &tokens : tokenized) {
    std::map<std::size_t, double> counts;
    for (const auto &t : tokens) counts[model.vocab_.at(t)] += 1.0;
    features.emplace_back(counts.begin(), counts.end());
  }

  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  auto &w = model.weights_;
  const std::size_t bias_index = w.size() - 1;

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) {
      double logit = w[bias_index];
      for (const auto &[j, c] : features[idx]) logit += w[j] * c;
      const double target = corpus[idx].label == Polarity::positive ? 1.0 : 0.0;
      const double residual = sigmoid(logit) - target;
      for (const auto &[j, c] : features[idx]) w[j] -= learning_rate * residual * c;
      w[bias_index] -= learning_rate * residual;
    }
  }

  model.meta_ = {corpus.size(), epochs, seed};
  return model;
}

}  // namespace dct
