// SPDX-License-Identifier: Apache-2.0
#include "dct/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dct/error.hpp"

namespace dct {

namespace {

using Rng = std::mt19937_64;

const std::string &pick(const std::vector<std::string> &words, Rng &rng) {
  std::uniform_int_distribution<std::size_t> dist(0, words.size() - 1);
  return words[dist(rng)];
}

std::string compose_review(Polarity polarity, const GenConfig &config, Rng &rng) {
  const auto &markers =
      polarity == Polarity::positive ? config.positive_words : config.negative_words;
  std::uniform_int_distribution<int> marker_count(1, 2);
  std::uniform_int_distribution<int> filler_count(1, 3);
  std::vector<std::string> words;
  for (int k = marker_count(rng); k > 0; --k) words.push_back(pick(markers, rng));
  for (int k = filler_count(rng); k > 0; --k) words.push_back(pick(config.filler_words, rng));
  std::shuffle(words.begin(), words.end(), rng);
  std::string text;
  for (const auto &w : words) {
    if (!text.empty()) text += ' ';
    text += w;
  }
  return text;
}

double rounded(double v) { return std::round(v * 100.0) / 100.0; }

StaticAttributes draw_static(int duration, Rng &rng) {
  std::lognormal_distribution<double> goal_dist(std::log(10000.0), 1.0);
  std::poisson_distribution<int> small(2.0);
  std::lognormal_distribution<double> audience(std::log(300.0), 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto choice = [&](std::vector<std::string> levels) {
    return AttributeValue(pick(levels, rng));
  };

  StaticAttributes a;
  auto &owner = a[AttributeCategory::owner];
  owner["owner_campaigns"] = static_cast<double>(small(rng));
  owner["owner_backed"] = static_cast<double>(small(rng) * 3);
  owner["owner_friends"] = std::round(audience(rng));
  owner["owner_verified"] = choice({"yes", "no"});
  owner["owner_country"] = choice({"US", "UK", "CA", "DE", "AU"});

  auto &backer = a[AttributeCategory::backer];
  backer["backer_followers"] = std::round(audience(rng));
  backer["backer_prelaunch_signups"] = std::round(audience(rng) / 3.0);
  backer["backer_prelaunch_comments"] = static_cast<double>(small(rng) * 5);
  backer["backer_region"] = choice({"americas", "europe", "asia", "oceania"});
  backer["backer_referral"] = choice({"social", "search", "direct"});

  auto &perks = a[AttributeCategory::perks];
  const double min_price = rounded(5.0 + 45.0 * unit(rng));
  perks["perk_count"] = static_cast<double>(1 + small(rng) * 2);
  perks["perk_min_price"] = min_price;
  perks["perk_max_price"] = rounded(min_price * (1.0 + 20.0 * unit(rng)));
  perks["perk_shipping"] = choice({"yes", "no"});
  perks["perk_type"] = choice({"hardware", "digital", "experience"});

  auto &other = a[AttributeCategory::other];
  other["goal"] = std::max(100.0, std::round(goal_dist(rng)));
  other["duration"] = static_cast<double>(duration);
  other["category"] = choice({"tech", "design", "film", "music", "games", "health"});
  other["currency"] = choice({"USD", "EUR", "GBP"});
  other["has_video"] = choice({"yes", "no"});
  return a;
}

}  // namespace

void validate(const GenConfig &c) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (c.n_campaigns == 0) throw Error("gen config: n_campaigns must be positive");
  if (c.duration_min < 3) throw Error("gen config: duration_min must be at least 3");
  if (c.duration_max < c.duration_min)
    throw Error("gen config: duration_max below duration_min");
  if (!(c.base_success_rate > 0.0 && c.base_success_rate < 1.0))
    throw Error("gen config: base_success_rate must lie in (0,1)");
  if (!in_unit(c.sentiment_signal)) throw Error("gen config: sentiment_signal must lie in [0,1]");
  if (!in_unit(c.funds_signal)) throw Error("gen config: funds_signal must lie in [0,1]");
  if (!(c.reviews_per_day >= 0.0)) throw Error("gen config: reviews_per_day must be >= 0");
  if (c.positive_words.empty() || c.negative_words.empty() || c.filler_words.empty())
    throw Error("gen config: word lists must be non-empty");
  for (const auto &p : c.positive_words)
    if (std::find(c.negative_words.begin(), c.negative_words.end(), p) != c.negative_words.end())
      throw Error("gen config: marker word '" + p + "' is both positive and negative");
  if (c.corpus_size < 2) throw Error("gen config: corpus_size must be at least 2");
}

GeneratedData generate(const GenConfig &config) {
  validate(config);
  Rng rng(config.seed);
  std::bernoulli_distribution outcome_dist(config.base_success_rate);
  std::uniform_int_distribution<int> duration_dist(config.duration_min, config.duration_max);
  std::normal_distribution<double> funds_noise(0.0, 1.0);

  GeneratedData data;
  data.campaigns.reserve(config.n_campaigns);
  const int width = static_cast<int>(std::to_string(config.n_campaigns).size());
  for (std::size_t k = 0; k < config.n_campaigns; ++k) {
    Campaign c;
    std::string number = std::to_string(k + 1);
    c.id = "c" + std::string(static_cast<std::size_t>(width) - number.size(), '0') + number;
    const bool success = outcome_dist(rng);
    c.outcome = success ? Outcome::success : Outcome::failure;
    const double sign = success ? 1.0 : -1.0;
    const int duration = duration_dist(rng);
    c.attributes = draw_static(duration, rng);

    const double daily_scale = c.attributes.goal() / duration;
    const double log_mean = std::log(0.5) + sign * config.funds_signal;
    std::bernoulli_distribution positive_review(0.5 + sign * config.sentiment_signal / 2.0);
    std::poisson_distribution<int> review_count(config.reviews_per_day);
    for (int day = 1; day <= duration; ++day) {
      DailyRecord record;
      record.day = day;
      record.funds_received = rounded(daily_scale * std::exp(log_mean + funds_noise(rng)));
      const int reviews = config.reviews_per_day > 0.0 ? review_count(rng) : 0;
      for (int r = 0; r < reviews; ++r) {
        const auto polarity = positive_review(rng) ? Polarity::positive : Polarity::negative;
        record.reviews.push_back({day, compose_review(polarity, config, rng), std::nullopt});
      }
      c.days.push_back(std::move(record));
    }
    data.campaigns.push_back(std::move(c));
  }

  Rng corpus_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  data.corpus.reserve(config.corpus_size);
  for (std::size_t k = 0; k < config.corpus_size; ++k) {
    const auto polarity = k % 2 == 0 ? Polarity::positive : Polarity::negative;
    data.corpus.push_back({compose_review(polarity, config, corpus_rng), polarity});
  }
  return data;
}

}  // namespace dct
