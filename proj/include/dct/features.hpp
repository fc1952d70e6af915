// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dct/sentiment.hpp"

namespace dct {

/// The four static attribute groups, in encoding order.
enum class AttributeCategory { owner = 0, backer = 1, perks = 2, other = 3 };

inline constexpr std::array<AttributeCategory, 4> kAttributeCategories = {
    AttributeCategory::owner, AttributeCategory::backer, AttributeCategory::perks,
    AttributeCategory::other};

const char *to_string(AttributeCategory category);
AttributeCategory category_from_string(const std::string &name);

/// Numbers are numeric attributes, strings are categorical levels.
using AttributeValue = std::variant<double, std::string>;
using AttributeMap = std::map<std::string, AttributeValue>;

struct StaticAttributes {
  std::array<AttributeMap, 4> groups;

  AttributeMap &operator[](AttributeCategory c) { return groups[static_cast<int>(c)]; }
  const AttributeMap &operator[](AttributeCategory c) const {
    return groups[static_cast<int>(c)];
  }

  /// `other.goal`; throws if missing or non-numeric.
  double goal() const;
  /// `other.duration` in days; throws if missing or non-numeric.
  int duration() const;
};

struct Review {
  int day = 1;
  std::string text;
  std::optional<double> p_pos;
};

struct DailyRecord {
  int day = 1;
  double funds_received = 0.0;
  std::vector<Review> reviews;
};

enum class Outcome { failure = 0, success = 1 };

struct Campaign {
  std::string id;
  StaticAttributes attributes;
  std::vector<DailyRecord> days;
  std::optional<Outcome> outcome;
};

/// Checks goal > 0, duration >= 1, days consecutive from 1 with
/// days.size() == duration, review days matching their record, disjoint
/// attribute names and p_pos in [0,1] where present.
void validate_campaign(const Campaign &campaign);

enum class AttributeKind { numeric, categorical };

struct AttributeSpec {
  AttributeCategory category = AttributeCategory::other;
  std::string name;
  AttributeKind kind = AttributeKind::numeric;
  // numeric
  double min = 0.0;
  double max = 0.0;
  // categorical; the reserved unknown slot is not listed
  std::vector<std::string> levels;

  std::size_t width() const {
    return kind == AttributeKind::numeric ? 1 : levels.size() + 1;
  }
};

struct FeatureSchema {
  std::vector<AttributeSpec> attributes;  // ordered by category, then name
  std::size_t bucket_count = 12;

  std::size_t static_width() const;
  std::size_t daily_width() const { return bucket_count + kReviewSummaryWidth; }

  static constexpr std::size_t kReviewSummaryWidth = 4;
};

struct DailySentimentStats {
  int day = 0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

inline constexpr std::size_t kDefaultMaxAttributes = 20;

/// Collects numeric min/max and categorical levels (first-seen order) from
/// the training campaigns. An attribute's kind comes from the type of its
/// values; mixing numbers and strings under one name is an error.
FeatureSchema fit_schema(const std::vector<Campaign> &training,
                         std::size_t bucket_count = 12,
                         std::size_t max_attributes = kDefaultMaxAttributes);

/// Concatenates the owner, backer, perks and other blocks. Numerics are
/// min-max scaled and clamped to [0,1] (constant attributes map to 0);
/// categoricals are one-hot with a trailing unknown slot. Attributes in the
/// schema but missing from `attrs` encode as 0 / unknown.
std::vector<double> encode_static(const StaticAttributes &attrs,
                                  const FeatureSchema &schema);

/// Index of the log2 funds bucket, min(floor(log2(1 + amount)), B - 1).
std::size_t funds_bucket(double amount, std::size_t bucket_count);
std::vector<double> bucket_funds(double amount, std::size_t bucket_count);

DailySentimentStats aggregate_day(const DailyRecord &record);

/// [funds one-hot] ++ [n_pos/(1+n), n_neg/(1+n), mean p_pos, scaled log count]
std::vector<double> build_daily_feature(const DailyRecord &record,
                                        const FeatureSchema &schema);

/// Writes p_pos into every review that has text. Returns the number of
/// reviews tagged.
std::size_t tag_reviews(std::vector<Campaign> &campaigns, const SentimentModel &model);

}  // namespace dct
