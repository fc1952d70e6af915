// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dct/features.hpp"
#include "dct/nn/network.hpp"

namespace dct {

/// `full` reads funds and review summaries each day; `funds_only` reads the
/// funds one-hot block alone.
enum class Variant { full, funds_only };

const char *to_string(Variant variant);
Variant variant_from_string(const std::string &name);

struct DctParameters {
  Variant variant = Variant::full;
  FeatureSchema schema;
  nn::NetworkParameters network;

  nn::NetworkSizes sizes() const { return network.sizes(); }
};

/// Width of one day's feature vector for the variant.
std::size_t daily_input_width(const FeatureSchema &schema, Variant variant);

std::vector<nn::Vector> daily_features(const Campaign &campaign, std::size_t days,
                                       const FeatureSchema &schema, Variant variant);

struct InitOptions {
  std::size_t static_dim = 8;
  std::size_t hidden_dim = 8;
  std::uint64_t seed = 0;
  /// Start both output heads at zero so every prediction is exactly 0.5.
  bool zero_heads = false;
};

DctParameters init_parameters(const FeatureSchema &schema, Variant variant,
                              const InitOptions &options);

/// Same static and hidden sizes as `templ`, daily input narrowed to the
/// funds block, freshly initialised.
DctParameters make_funds_only(const DctParameters &templ, const FeatureSchema &schema,
                              std::uint64_t seed);

struct ForwardResult {
  double p_success = 0.0;
  nn::Vector alpha;
  std::vector<nn::Probabilities> day_emotions;  // (negative, positive) per day
};

/// Runs the model on days 1..prefix_days of the campaign.
ForwardResult forward(const Campaign &campaign, std::size_t prefix_days,
                      const DctParameters &params);

enum class Emotion { none, pos, neg };
const char *to_string(Emotion emotion);

struct TrackingPoint {
  int day = 0;
  double p_success_full = 0.0;
  double p_success_funds_only = 0.0;
  Emotion emotion = Emotion::none;
  double emotion_prob = 0.0;  // 0 when emotion is none
};

struct TrackingCurve {
  std::vector<TrackingPoint> points;
  nn::Vector attention;  // over all days, from the final-day pass
};

/// Per-day success probabilities from both models on every prefix, plus the
/// day's predicted emotion. An emotion is shown only when the day has at
/// least one review and the winning probability is strictly above 0.5.
TrackingCurve track(const Campaign &campaign, const DctParameters &full,
                    const DctParameters &funds_only);

struct TrainConfig {
  std::size_t epochs = 30;
  double learning_rate = 0.1;
  std::size_t batch_size = 16;
  double aux_weight = 0.2;
  std::uint64_t seed = 0;
  double clip_norm = 5.0;
  std::size_t static_dim = 8;
  std::size_t hidden_dim = 8;
  bool zero_heads = false;
  /// Funds buckets used when the schema is fitted from the training data.
  std::size_t bucket_count = 12;
};

void validate(const TrainConfig &config);

struct TrainResult {
  DctParameters params;
  std::vector<double> loss_history;  // mean training loss per epoch
};

/// Mini-batch SGD on CE(success) + aux_weight * mean CE(day emotion) against
/// each day's majority review label, clipping the batch gradient norm. The
/// funds-only variant ignores reviews entirely, so its auxiliary term is off.
TrainResult train(const std::vector<Campaign> &dataset, const FeatureSchema &schema,
                  const TrainConfig &config, Variant variant);

/// Majority polarity of the day's tagged reviews (0 negative, 1 positive);
/// nullopt for days without reviews or with a tie.
std::optional<std::size_t> majority_label(const DailyRecord &record);

/// Training loss of one campaign at the given parameters.
double campaign_loss(const Campaign &campaign, const DctParameters &params, double aux_weight);

struct Metrics {
  std::size_t count = 0;
  double accuracy = 0.0;
  std::optional<double> auc;  // undefined for single-class data
  double mean_cross_entropy = 0.0;
};

/// Scores every campaign on its full sequence.
Metrics evaluate(const std::vector<Campaign> &dataset, const DctParameters &params);

/// Rank-statistic AUC with midranks for ties; nullopt when either class is
/// missing.
std::optional<double> roc_auc(const std::vector<double> &scores,
                              const std::vector<int> &labels);

}  // namespace dct
