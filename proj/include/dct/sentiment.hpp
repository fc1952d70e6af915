// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dct {

enum class Polarity { negative = 0, positive = 1 };

struct LabeledDocument {
  std::string text;
  Polarity label = Polarity::negative;
};

struct SentimentTrainingMeta {
  std::size_t corpus_size = 0;
  std::size_t epochs = 0;
  std::uint64_t seed = 0;
};

/// Lowercases, drops every non-alphanumeric character and splits on
/// whitespace.
std::vector<std::string> tokenize(std::string_view text);

/// Bag-of-words logistic regression polarity model.
///
/// Weights are stored one per vocabulary entry followed by the bias, so
/// weights().size() == vocabulary().size() + 1 always holds.
class SentimentModel {
 public:
  SentimentModel() = default;

  /// Builds a model from a vocabulary listed in any order together with the
  /// matching per-token weights. Indices are assigned by list position.
  SentimentModel(const std::vector<std::string> &tokens,
                 const std::vector<double> &token_weights, double bias,
                 SentimentTrainingMeta meta = {});

  const std::map<std::string, std::size_t> &vocabulary() const { return vocab_; }
  const std::vector<double> &weights() const { return weights_; }
  double bias() const { return weights_.back(); }
  const SentimentTrainingMeta &meta() const { return meta_; }

  /// Vocabulary tokens ordered by index.
  std::vector<std::string> tokens_by_index() const;

  /// Probability that the text is positive; unknown tokens contribute
  /// nothing.
  double classify(std::string_view text) const;

 private:
  friend SentimentModel train_sentiment(const std::vector<LabeledDocument> &,
                                        std::size_t, double, std::uint64_t);

  std::map<std::string, std::size_t> vocab_;
  std::vector<double> weights_{0.0};
  SentimentTrainingMeta meta_;
};

/// Stochastic gradient descent on the logistic loss over token counts.
/// Each epoch visits the corpus in a seeded shuffled order; initial weights
/// are derived from (seed, token) so they do not depend on vocabulary order.
SentimentModel train_sentiment(const std::vector<LabeledDocument> &corpus,
                               std::size_t epochs, double learning_rate,
                               std::uint64_t seed);

inline double classify(const SentimentModel &model, std::string_view text) {
  return model.classify(text);
}

/// Discrete label of a polarity probability; exactly 0.5 is negative.
inline Polarity polarity_of(double p_pos) {
  return p_pos > 0.5 ? Polarity::positive : Polarity::negative;
}

}  // namespace dct
