// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dct/features.hpp"
#include "dct/sentiment.hpp"

namespace dct {

struct GenConfig {
  std::size_t n_campaigns = 200;
  int duration_min = 10;
  int duration_max = 30;
  double base_success_rate = 0.40;
  /// Strength of the outcome/review-polarity link, 0 = none.
  double sentiment_signal = 0.5;
  /// Strength of the outcome/daily-funds link, 0 = none.
  double funds_signal = 0.5;
  /// Poisson mean of reviews per day.
  double reviews_per_day = 1.5;
  std::vector<std::string> positive_words = {"great", "love", "amazing", "awesome",
                                             "excellent", "fantastic", "brilliant", "happy"};
  std::vector<std::string> negative_words = {"refund", "broken", "terrible", "scam",
                                             "awful", "delay", "disappointed", "worst"};
  std::vector<std::string> filler_words = {"the", "product", "team", "campaign", "update",
                                           "shipping", "this", "backers", "really", "is"};
  /// Documents in the separately emitted labelled sentiment corpus.
  std::size_t corpus_size = 400;
  std::uint64_t seed = 0;
};

void validate(const GenConfig &config);

struct GeneratedData {
  std::vector<Campaign> campaigns;  // reviews carry text only
  std::vector<LabeledDocument> corpus;
};

/// Seeded synthetic corpus. Outcomes are Bernoulli(base rate). Each day's
/// funds are (goal / duration) * LogNormal(ln 0.5 +/- funds_signal, 1), the
/// sign following the outcome. Each review is positive with probability
/// 0.5 +/- sentiment_signal / 2 and is built from marker words of its
/// polarity mixed with neutral filler. Static attributes (five per
/// category) are drawn independently of the outcome.
GeneratedData generate(const GenConfig &config);

}  // namespace dct
