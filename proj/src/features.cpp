// SPDX-License-Identifier: Apache-2.0
#include "dct/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dct/error.hpp"
#include "dct/sentiment.hpp"

namespace dct {

namespace {

constexpr double kReviewCountCap = 100.0;

double numeric_value(const AttributeMap &map, const std::string &name) {
  auto it = map.find(name);
  if (it == map.end()) throw Error("missing static attribute '" + name + "'");
  if (const double *v = std::get_if<double>(&it->second)) return *v;
  throw Error("static attribute '" + name + "' must be numeric");
}

}  // namespace

const char *to_string(AttributeCategory category) {
  switch (category) {
    case AttributeCategory::owner: return "owner";
    case AttributeCategory::backer: return "backer";
    case AttributeCategory::perks: return "perks";
    case AttributeCategory::other: return "other";
  }
  return "other";
}

AttributeCategory category_from_string(const std::string &name) {
  for (auto c : kAttributeCategories)
    if (name == to_string(c)) return c;
  throw Error("unknown attribute category '" + name + "'");
}

double StaticAttributes::goal() const {
  return numeric_value((*this)[AttributeCategory::other], "goal");
}

int StaticAttributes::duration() const {
  const double d = numeric_value((*this)[AttributeCategory::other], "duration");
  if (d != std::floor(d)) throw Error("duration must be a whole number of days");
  return static_cast<int>(d);
}

void validate_campaign(const Campaign &campaign) {
  const std::string where = "campaign '" + campaign.id + "': ";
  const double goal = campaign.attributes.goal();
  if (!(goal > 0.0)) throw Error(where + "goal must be positive");
  const int duration = campaign.attributes.duration();
  if (duration < 1) throw Error(where + "duration must be at least 1 day");

  std::set<std::string> names;
  for (const auto &group : campaign.attributes.groups)
    for (const auto &[name, value] : group)
      if (!names.insert(name).second)
        throw Error(where + "attribute '" + name + "' appears in two categories");

  if (campaign.days.size() != static_cast<std::size_t>(duration))
    throw Error(where + "has " + std::to_string(campaign.days.size()) +
                " daily records but duration " + std::to_string(duration));
  for (std::size_t i = 0; i < campaign.days.size(); ++i) {
    const auto &record = campaign.days[i];
    if (record.day != static_cast<int>(i) + 1)
      throw Error(where + "days must be consecutive from 1");
    if (!(record.funds_received >= 0.0) || !std::isfinite(record.funds_received))
      throw Error(where + "negative or non-finite funds on day " +
                  std::to_string(record.day));
    for (const auto &review : record.reviews) {
      if (review.day != record.day)
        throw Error(where + "review day does not match its record");
      if (review.p_pos && !(*review.p_pos >= 0.0 && *review.p_pos <= 1.0))
        throw Error(where + "review p_pos outside [0,1]");
    }
  }
}

std::size_t FeatureSchema::static_width() const {
  std::size_t width = 0;
  for (const auto &a : attributes) width += a.width();
  return width;
}

FeatureSchema fit_schema(const std::vector<Campaign> &training,
                         std::size_t bucket_count, std::size_t max_attributes) {
  if (training.empty()) throw Error("fit_schema: empty training set");
  if (bucket_count < 2) throw Error("fit_schema: bucket count must be at least 2");

  // (category, name) -> spec, kept sorted so the layout is independent of
  // campaign order.
  std::map<std::pair<int, std::string>, AttributeSpec> specs;

  for (const auto &campaign : training) {
    for (auto category : kAttributeCategories) {
      for (const auto &[name, value] : campaign.attributes[category]) {
        const auto key = std::make_pair(static_cast<int>(category), name);
        const bool numeric = std::holds_alternative<double>(value);
        auto [it, inserted] = specs.try_emplace(key);
        AttributeSpec &spec = it->second;
        if (inserted) {
          spec.category = category;
          spec.name = name;
          spec.kind = numeric ? AttributeKind::numeric : AttributeKind::categorical;
          if (numeric) spec.min = spec.max = std::get<double>(value);
        } else if ((spec.kind == AttributeKind::numeric) != numeric) {
          throw Error("fit_schema: attribute '" + name + "' mixes numeric and categorical values");
        }
        if (numeric) {
          const double v = std::get<double>(value);
          if (!std::isfinite(v))
            throw Error("fit_schema: attribute '" + name + "' is not finite");
          spec.min = std::min(spec.min, v);
          spec.max = std::max(spec.max, v);
        } else {
          const auto &level = std::get<std::string>(value);
          if (std::find(spec.levels.begin(), spec.levels.end(), level) == spec.levels.end())
            spec.levels.push_back(level);
        }
      }
    }
  }

  if (specs.size() > max_attributes)
    throw Error("fit_schema: " + std::to_string(specs.size()) +
                " static attributes exceed the configured limit of " +
                std::to_string(max_attributes));

  FeatureSchema schema;
  schema.bucket_count = bucket_count;
  for (auto &[key, spec] : specs) schema.attributes.push_back(std::move(spec));
  return schema;
}

std::vector<double> encode_static(const StaticAttributes &attrs,
                                  const FeatureSchema &schema) {
  for (auto category : kAttributeCategories) {
    for (const auto &[name, value] : attrs[category]) {
      const bool known = std::any_of(
          schema.attributes.begin(), schema.attributes.end(),
          [&](const AttributeSpec &a) { return a.category == category && a.name == name; });
      if (!known)
        throw Error(std::string("schema mismatch: attribute '") + to_string(category) +
                    "." + name + "' is not in the schema");
    }
  }

  std::vector<double> out;
  out.reserve(schema.static_width());
  for (const auto &spec : schema.attributes) {
    const auto &group = attrs[spec.category];
    auto it = group.find(spec.name);
    if (spec.kind == AttributeKind::numeric) {
      double scaled = 0.0;
      if (it != group.end()) {
        const double *v = std::get_if<double>(&it->second);
        if (!v) throw Error("schema mismatch: attribute '" + spec.name + "' must be numeric");
        if (spec.max > spec.min)
          scaled = std::clamp((*v - spec.min) / (spec.max - spec.min), 0.0, 1.0);
      }
      out.push_back(scaled);
    } else {
      std::size_t slot = spec.levels.size();  // unknown
      if (it != group.end()) {
        const std::string *level = std::get_if<std::string>(&it->second);
        if (!level)
          throw Error("schema mismatch: attribute '" + spec.name + "' must be categorical");
        auto pos = std::find(spec.levels.begin(), spec.levels.end(), *level);
        if (pos != spec.levels.end())
          slot = static_cast<std::size_t>(pos - spec.levels.begin());
      }
      for (std::size_t k = 0; k <= spec.levels.size(); ++k) out.push_back(k == slot ? 1.0 : 0.0);
    }
  }
  return out;
}

std::size_t funds_bucket(double amount, std::size_t bucket_count) {
  if (bucket_count < 2) throw Error("bucket_funds: bucket count must be at least 2");
  if (!(amount >= 0.0)) throw Error("bucket_funds: negative amount");
  if (!std::isfinite(amount)) return bucket_count - 1;
  const double level = std::floor(std::log2(1.0 + amount));
  if (level >= static_cast<double>(bucket_count - 1)) return bucket_count - 1;
  return static_cast<std::size_t>(level);
}

std::vector<double> bucket_funds(double amount, std::size_t bucket_count) {
  std::vector<double> out(bucket_count, 0.0);
  out[funds_bucket(amount, bucket_count)] = 1.0;
  return out;
}

DailySentimentStats aggregate_day(const DailyRecord &record) {
  DailySentimentStats stats;
  stats.day = record.day;
  for (const auto &review : record.reviews) {
    if (!review.p_pos) throw Error("untagged review");
    if (polarity_of(*review.p_pos) == Polarity::positive)
      ++stats.n_pos;
    else
      ++stats.n_neg;
  }
  return stats;
}

std::vector<double> build_daily_feature(const DailyRecord &record,
                                        const FeatureSchema &schema) {
  const auto stats = aggregate_day(record);
  const double total = static_cast<double>(record.reviews.size());

  double mean_p = 0.5;
  if (!record.reviews.empty()) {
    double sum = 0.0;
    for (const auto &review : record.reviews) sum += *review.p_pos;
    mean_p = sum / total;
  }

  auto out = bucket_funds(record.funds_received, schema.bucket_count);
  out.push_back(static_cast<double>(stats.n_pos) / (1.0 + total));
  out.push_back(static_cast<double>(stats.n_neg) / (1.0 + total));
  out.push_back(mean_p);
  out.push_back(std::min(1.0, std::log(1.0 + total) / std::log(1.0 + kReviewCountCap)));
  return out;
}

std::size_t tag_reviews(std::vector<Campaign> &campaigns, const SentimentModel &model) {
  std::size_t tagged = 0;
  for (auto &campaign : campaigns)
    for (auto &record : campaign.days)
      for (auto &review : record.reviews)
        if (!review.text.empty()) {
          review.p_pos = model.classify(review.text);
          ++tagged;
        }
  return tagged;
}

}  // namespace dct
