// SPDX-License-Identifier: Apache-2.0
#include "dct/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <spdlog/spdlog.h>

#include "dct/error.hpp"
#include "dct/sentiment.hpp"

namespace dct {

namespace {

void check_schema_width(const DctParameters &params) {
  const auto sizes = params.sizes();
  if (sizes.static_input != params.schema.static_width() ||
      sizes.daily_input != daily_input_width(params.schema, params.variant))
    throw Error("schema mismatch: parameters do not fit their feature schema");
}

struct PreparedCampaign {
  nn::Vector static_input;
  std::vector<nn::Vector> daily;
  nn::LossTargets targets;
};

PreparedCampaign prepare(const Campaign &campaign, const FeatureSchema &schema,
                         Variant variant, double aux_weight) {
  if (!campaign.outcome)
    throw Error("campaign '" + campaign.id + "' has no known outcome");
  validate_campaign(campaign);
  PreparedCampaign out;
  out.static_input = encode_static(campaign.attributes, schema);
  out.daily = daily_features(campaign, campaign.days.size(), schema, variant);
  out.targets.success_label = static_cast<std::size_t>(*campaign.outcome);
  if (variant == Variant::full && aux_weight > 0.0) {
    out.targets.aux_weight = aux_weight;
    for (const auto &record : campaign.days)
      out.targets.emotion_labels.push_back(majority_label(record));
  }
  return out;
}

}  // namespace

const char *to_string(Variant variant) {
  return variant == Variant::full ? "full" : "funds-only";
}

Variant variant_from_string(const std::string &name) {
  if (name == "full") return Variant::full;
  if (name == "funds-only" || name == "funds_only") return Variant::funds_only;
  throw Error("unknown variant '" + name + "' (expected full or funds-only)");
}

const char *to_string(Emotion emotion) {
  switch (emotion) {
    case Emotion::pos: return "pos";
    case Emotion::neg: return "neg";
    case Emotion::none: return "none";
  }
  return "none";
}

std::size_t daily_input_width(const FeatureSchema &schema, Variant variant) {
  return variant == Variant::full ? schema.daily_width() : schema.bucket_count;
}

std::vector<nn::Vector> daily_features(const Campaign &campaign, std::size_t days,
                                       const FeatureSchema &schema, Variant variant) {
  if (days > campaign.days.size())
    throw Error("campaign '" + campaign.id + "' has fewer days than requested");
  std::vector<nn::Vector> out;
  out.reserve(days);
  for (std::size_t t = 0; t < days; ++t) {
    const auto &record = campaign.days[t];
    if (variant == Variant::full)
      out.push_back(build_daily_feature(record, schema));
    else
      out.push_back(bucket_funds(record.funds_received, schema.bucket_count));
  }
  return out;
}

DctParameters init_parameters(const FeatureSchema &schema, Variant variant,
                              const InitOptions &options) {
  if (options.static_dim == 0 || options.hidden_dim == 0)
    throw Error("model sizes must be positive");
  const nn::NetworkSizes sizes{schema.static_width(), options.static_dim, options.hidden_dim,
                               daily_input_width(schema, variant)};
  DctParameters params{variant, schema, nn::initialize_network(sizes, options.seed)};
  if (options.zero_heads) {
    params.network.success_head.weights.fill(0.0);
    params.network.emotion_head.weights.fill(0.0);
  }
  return params;
}

DctParameters make_funds_only(const DctParameters &templ, const FeatureSchema &schema,
                              std::uint64_t seed) {
  const auto sizes = templ.sizes();
  return init_parameters(schema, Variant::funds_only,
                         {sizes.static_dim, sizes.hidden, seed, false});
}

ForwardResult forward(const Campaign &campaign, std::size_t prefix_days,
                      const DctParameters &params) {
  if (prefix_days == 0) throw Error("empty prefix");
  check_schema_width(params);
  const auto static_input = encode_static(campaign.attributes, params.schema);
  const auto daily = daily_features(campaign, prefix_days, params.schema, params.variant);
  const auto encoding = nn::encode_sequence(static_input, daily, params.network);
  auto prediction = nn::predict_prefix(encoding, prefix_days, params.network);

  ForwardResult out;
  out.p_success = prediction.success_probs[1];
  out.alpha = std::move(prediction.alpha);
  out.day_emotions.reserve(prefix_days);
  for (const auto &v : encoding.cooperative)
    out.day_emotions.push_back(nn::predict_emotion(v, params.network));
  return out;
}

TrackingCurve track(const Campaign &campaign, const DctParameters &full,
                    const DctParameters &funds_only) {
  const std::size_t n = campaign.days.size();
  if (n == 0) throw Error("campaign '" + campaign.id + "' has no days to track");
  if (full.variant != Variant::full || funds_only.variant != Variant::funds_only)
    throw Error("track needs one full and one funds-only model");
  check_schema_width(full);
  check_schema_width(funds_only);

  const auto full_encoding =
      nn::encode_sequence(encode_static(campaign.attributes, full.schema),
                          daily_features(campaign, n, full.schema, Variant::full), full.network);
  const auto funds_encoding = nn::encode_sequence(
      encode_static(campaign.attributes, funds_only.schema),
      daily_features(campaign, n, funds_only.schema, Variant::funds_only), funds_only.network);

  TrackingCurve curve;
  curve.points.reserve(n);
  for (std::size_t t = 1; t <= n; ++t) {
    auto full_pred = nn::predict_prefix(full_encoding, t, full.network);
    const auto funds_pred = nn::predict_prefix(funds_encoding, t, funds_only.network);

    TrackingPoint point;
    point.day = campaign.days[t - 1].day;
    point.p_success_full = full_pred.success_probs[1];
    point.p_success_funds_only = funds_pred.success_probs[1];

    const auto emotion = nn::predict_emotion(full_encoding.cooperative[t - 1], full.network);
    const bool positive = emotion[1] > emotion[0];
    const double shown = positive ? emotion[1] : emotion[0];
    if (!campaign.days[t - 1].reviews.empty() && shown > 0.5) {
      point.emotion = positive ? Emotion::pos : Emotion::neg;
      point.emotion_prob = shown;
    }
    curve.points.push_back(point);
    if (t == n) curve.attention = std::move(full_pred.alpha);
  }
  return curve;
}

void validate(const TrainConfig &config) {
  if (config.epochs == 0) throw Error("train config: epochs must be positive");
  if (!(config.learning_rate > 0.0)) throw Error("train config: learning rate must be positive");
  if (config.batch_size == 0) throw Error("train config: batch size must be positive");
  if (!(config.aux_weight >= 0.0)) throw Error("train config: aux weight must be non-negative");
  if (!(config.clip_norm > 0.0)) throw Error("train config: clip norm must be positive");
  if (config.static_dim == 0 || config.hidden_dim == 0)
    throw Error("train config: model sizes must be positive");
  if (config.bucket_count < 2) throw Error("train config: bucket_count must be at least 2");
}

std::optional<std::size_t> majority_label(const DailyRecord &record) {
  const auto stats = aggregate_day(record);
  if (stats.n_pos == stats.n_neg) return std::nullopt;
  return stats.n_pos > stats.n_neg ? 1 : 0;
}

TrainResult train(const std::vector<Campaign> &dataset, const FeatureSchema &schema,
                  const TrainConfig &config, Variant variant) {
  validate(config);
  if (dataset.empty()) throw Error("train: empty dataset");

  std::vector<PreparedCampaign> prepared;
  prepared.reserve(dataset.size());
  for (const auto &campaign : dataset)
    prepared.push_back(prepare(campaign, schema, variant, config.aux_weight));

  TrainResult result;
  result.params = init_parameters(
      schema, variant, {config.static_dim, config.hidden_dim, config.seed, config.zero_heads});
  nn::NetworkParameters &net = result.params.network;

  std::vector<std::size_t> order(prepared.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed ^ 0x5bd1e995ULL);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      nn::GradientBundle batch_grad = nn::zero_network(net.sizes());
      for (std::size_t k = start; k < stop; ++k) {
        const auto &item = prepared[order[k]];
        const auto record = nn::forward_record(item.static_input, item.daily, net);
        const auto loss = nn::sequence_loss(record, item.targets);
        epoch_loss += loss.loss;
        nn::add_scaled(batch_grad, nn::backward(record, net, loss.upstream), 1.0);
      }
      nn::scale(batch_grad, 1.0 / static_cast<double>(stop - start));
      const double norm = nn::l2_norm(batch_grad);
      if (norm > config.clip_norm) nn::scale(batch_grad, config.clip_norm / norm);
      nn::add_scaled(net, batch_grad, -config.learning_rate);
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(prepared.size()));
    spdlog::debug("epoch {} loss {:.6f}", epoch + 1, result.loss_history.back());
  }
  return result;
}

double campaign_loss(const Campaign &campaign, const DctParameters &params, double aux_weight) {
  check_schema_width(params);
  const auto item = prepare(campaign, params.schema, params.variant, aux_weight);
  const auto record = nn::forward_record(item.static_input, item.daily, params.network);
  return nn::sequence_loss(record, item.targets).loss;
}

std::optional<double> roc_auc(const std::vector<double> &scores, const std::vector<int> &labels) {
  if (scores.size() != labels.size()) throw Error("roc_auc: scores and labels differ in length");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });

  std::vector<double> rank(scores.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = midrank;
    i = j + 1;
  }

  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 1) {
      rank_sum += rank[i];
      ++n_pos;
    }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  const double np = static_cast<double>(n_pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

Metrics evaluate(const std::vector<Campaign> &dataset, const DctParameters &params) {
  Metrics m;
  m.count = dataset.size();
  if (dataset.empty()) return m;
  std::vector<double> scores;
  std::vector<int> labels;
  std::size_t correct = 0;
  double ce = 0.0;
  for (const auto &campaign : dataset) {
    if (!campaign.outcome) throw Error("campaign '" + campaign.id + "' has no known outcome");
    const double p = forward(campaign, campaign.days.size(), params).p_success;
    const int label = static_cast<int>(*campaign.outcome);
    scores.push_back(p);
    labels.push_back(label);
    if ((p > 0.5) == (label == 1)) ++correct;
    ce += nn::cross_entropy({1.0 - p, p}, static_cast<std::size_t>(label));
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(dataset.size());
  m.mean_cross_entropy = ce / static_cast<double>(dataset.size());
  m.auc = roc_auc(scores, labels);
  return m;
}

}  // namespace dct
