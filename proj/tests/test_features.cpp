// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "dct/error.hpp"
#include "dct/features.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace dct;
using testing::make_campaign;

namespace {

Campaign with_goal(const std::string &id, double goal) {
  return make_campaign(id, {10.0, 20.0, 30.0}, {}, Outcome::success, goal);
}

const AttributeSpec &find_spec(const FeatureSchema &s, const std::string &name) {
  auto it = std::find_if(s.attributes.begin(), s.attributes.end(),
                         [&](const AttributeSpec &a) { return a.name == name; });
  REQUIRE(it != s.attributes.end());
  return *it;
}

}  // namespace

TEST_CASE("schema fitting collects numeric ranges") {
  const auto schema = fit_schema({with_goal("a", 100), with_goal("b", 500), with_goal("c", 1000)});
  const auto &goal = find_spec(schema, "goal");
  CHECK(goal.kind == AttributeKind::numeric);
  CHECK(goal.min == 100.0);
  CHECK(goal.max == 1000.0);
  CHECK(schema.bucket_count == 12);
  CHECK(schema.daily_width() == 16);
}

TEST_CASE("constant numeric attributes encode as zero") {
  const std::vector<Campaign> train{with_goal("a", 500), with_goal("b", 500)};
  const auto schema = fit_schema(train);
  for (const auto &c : train) {
    const auto v = encode_static(c.attributes, schema);
    for (double x : v) CHECK(std::isfinite(x));
  }
  const auto &goal = find_spec(schema, "goal");
  CHECK(goal.min == goal.max);
  // Layout is owner.country then other.duration, other.goal.
  CHECK(encode_static(train[0].attributes, schema).back() == 0.0);
}

TEST_CASE("categorical levels keep first-seen order plus an unknown slot") {
  auto a = with_goal("a", 100), b = with_goal("b", 200), c = with_goal("c", 300);
  a.attributes[AttributeCategory::other]["category"] = std::string("tech");
  b.attributes[AttributeCategory::other]["category"] = std::string("art");
  c.attributes[AttributeCategory::other]["category"] = std::string("tech");
  const auto schema = fit_schema({a, b, c});
  const auto &cat = find_spec(schema, "category");
  CHECK(cat.kind == AttributeKind::categorical);
  CHECK(cat.levels == std::vector<std::string>{"tech", "art"});
  CHECK(cat.width() == 3);

  auto unseen = with_goal("d", 100);
  unseen.attributes[AttributeCategory::other]["category"] = std::string("music");
  const auto v = encode_static(unseen.attributes, schema);
  // owner.country (US, unknown), other.category (tech, art, unknown), duration, goal
  REQUIRE(v.size() == 7);
  CHECK(std::vector<double>(v.begin() + 2, v.begin() + 5) == std::vector<double>{0, 0, 1});
  const auto tech = encode_static(a.attributes, schema);
  CHECK(std::vector<double>(tech.begin() + 2, tech.begin() + 5) == std::vector<double>{1, 0, 0});
}

TEST_CASE("static encoding scales and clamps") {
  const auto schema = fit_schema({with_goal("a", 100), with_goal("b", 1000)});
  auto goal_component = [&](double goal) {
    return encode_static(with_goal("x", goal).attributes, schema).back();
  };
  CHECK(goal_component(100) == 0.0);
  CHECK(goal_component(1000) == 1.0);
  CHECK(goal_component(1450) == 1.0);
  CHECK(goal_component(10) == 0.0);
  CHECK(std::abs(goal_component(550) - 0.5) < 1e-15);

  const auto x = with_goal("x", 321), y = with_goal("y", 321);
  CHECK(encode_static(x.attributes, schema) == encode_static(y.attributes, schema));
  CHECK(encode_static(x.attributes, schema).size() == schema.static_width());
}

TEST_CASE("static encoding rejects attributes outside the schema") {
  const auto schema = fit_schema({with_goal("a", 100), with_goal("b", 1000)});
  auto extra = with_goal("x", 200);
  extra.attributes[AttributeCategory::perks]["perk_count"] = 3.0;
  CHECK_THROWS_WITH_AS(encode_static(extra.attributes, schema),
                       doctest::Contains("schema mismatch"), Error);

  auto wrong_type = with_goal("x", 200);
  wrong_type.attributes[AttributeCategory::other]["goal"] = std::string("lots");
  CHECK_THROWS_WITH_AS(encode_static(wrong_type.attributes, schema),
                       doctest::Contains("schema mismatch"), Error);

  auto missing = with_goal("x", 200);
  missing.attributes[AttributeCategory::owner].clear();
  const auto v = encode_static(missing.attributes, schema);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == 1.0);
}

TEST_CASE("schema fitting errors") {
  CHECK_THROWS_AS(fit_schema({}), Error);
  auto a = with_goal("a", 100), b = with_goal("b", 200);
  b.attributes[AttributeCategory::owner]["country"] = 4.0;
  CHECK_THROWS_AS(fit_schema({a, b}), Error);
  CHECK_THROWS_AS(fit_schema({a}, 1), Error);
  CHECK_THROWS_AS(fit_schema({a}, 12, 2), Error);
}

TEST_CASE("funds buckets") {
  CHECK(funds_bucket(0.0, 12) == 0);
  CHECK(funds_bucket(100.0, 12) == 6);
  CHECK(funds_bucket(1e9, 12) == 11);
  CHECK(funds_bucket(1.0, 12) == 1);
  CHECK(funds_bucket(2.99, 12) == 1);
  CHECK(funds_bucket(3.0, 12) == 2);
  CHECK(funds_bucket(100.0, 4) == 3);
  CHECK_THROWS_AS(funds_bucket(-0.01, 12), Error);
  CHECK_THROWS_AS(funds_bucket(5.0, 1), Error);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1e6);
  for (int i = 0; i < 500; ++i) {
    const auto v = bucket_funds(u(rng), 12);
    REQUIRE(v.size() == 12);
    CHECK(std::count(v.begin(), v.end(), 1.0) == 1);
    CHECK(std::count(v.begin(), v.end(), 0.0) == 11);
  }
}

TEST_CASE("daily review counts") {
  DailyRecord day{6, 0.0, {}};
  for (int i = 0; i < 10; ++i) day.reviews.push_back({6, "", 0.9});
  for (int i = 0; i < 6; ++i) day.reviews.push_back({6, "", 0.2});
  const auto stats = aggregate_day(day);
  CHECK(stats.day == 6);
  CHECK(stats.n_pos == 10);
  CHECK(stats.n_neg == 6);

  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(day.reviews.begin(), day.reviews.end(), rng);
    const auto s = aggregate_day(day);
    CHECK(s.n_pos == 10);
    CHECK(s.n_neg == 6);
  }

  const auto empty = aggregate_day({3, 5.0, {}});
  CHECK(empty.n_pos == 0);
  CHECK(empty.n_neg == 0);

  const DailyRecord ties{1, 0.0, {{1, "", 0.5}, {1, "", 0.5}, {1, "", 0.5}}};
  CHECK(aggregate_day(ties).n_neg == 3);
  CHECK(aggregate_day(ties).n_pos == 0);

  const DailyRecord untagged{1, 0.0, {{1, "hello", std::nullopt}}};
  CHECK_THROWS_WITH_AS(aggregate_day(untagged), "untagged review", Error);
}

TEST_CASE("daily feature vector") {
  FeatureSchema schema;
  schema.bucket_count = 4;
  CHECK(build_daily_feature({1, 0.0, {}}, schema) ==
        std::vector<double>{1, 0, 0, 0, 0, 0, 0.5, 0});

  const DailyRecord two{1, 0.0, {{1, "", 0.9}, {1, "", 0.8}}};
  const auto v = build_daily_feature(two, schema);
  REQUIRE(v.size() == 8);
  CHECK(std::vector<double>(v.begin(), v.begin() + 4) == std::vector<double>{1, 0, 0, 0});
  CHECK(std::abs(v[4] - 2.0 / 3.0) < 1e-15);
  CHECK(v[5] == 0.0);
  CHECK(std::abs(v[6] - 0.85) < 1e-15);
  CHECK(std::abs(v[7] - oracle::kLog3OverLog101) < 1e-15);

  DailyRecord flood{1, 50.0, {}};
  for (int i = 0; i < 500; ++i) flood.reviews.push_back({1, "", i % 3 == 0 ? 0.1 : 0.7});
  const auto f = build_daily_feature(flood, schema);
  CHECK(f[7] == 1.0);
  CHECK(f[3] == 1.0);

  const DailyRecord untagged{1, 0.0, {{1, "x", std::nullopt}}};
  CHECK_THROWS_WITH_AS(build_daily_feature(untagged, schema), "untagged review", Error);
}

TEST_CASE("review summary stays in the unit interval") {
  FeatureSchema schema;
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> count(0, 150);
  std::uniform_real_distribution<double> p(0.0, 1.0), funds(0.0, 1e5);
  for (int trial = 0; trial < 300; ++trial) {
    DailyRecord rec{1, funds(rng), {}};
    const int n = count(rng);
    for (int i = 0; i < n; ++i) rec.reviews.push_back({1, "", p(rng)});
    const auto v = build_daily_feature(rec, schema);
    REQUIRE(v.size() == schema.daily_width());
    for (std::size_t k = schema.bucket_count; k < v.size(); ++k) {
      CHECK(v[k] >= 0.0);
      CHECK(v[k] <= 1.0);
    }
    CHECK(v == build_daily_feature(rec, schema));
  }
}

TEST_CASE("campaign validation") {
  auto ok = make_campaign("ok", {1, 2, 3}, {{0.9}, {}, {0.1, 0.2}});
  CHECK_NOTHROW(validate_campaign(ok));
  CHECK(ok.attributes.goal() == 1000.0);
  CHECK(ok.attributes.duration() == 3);

  auto gap = ok;
  gap.days[1].day = 5;
  CHECK_THROWS_AS(validate_campaign(gap), Error);

  auto short_days = ok;
  short_days.days.pop_back();
  CHECK_THROWS_AS(validate_campaign(short_days), Error);

  auto bad_review = ok;
  bad_review.days[0].reviews[0].day = 2;
  CHECK_THROWS_AS(validate_campaign(bad_review), Error);

  auto bad_p = ok;
  bad_p.days[0].reviews[0].p_pos = 1.5;
  CHECK_THROWS_AS(validate_campaign(bad_p), Error);

  auto negative = ok;
  negative.days[2].funds_received = -1.0;
  CHECK_THROWS_AS(validate_campaign(negative), Error);

  auto no_goal = ok;
  no_goal.attributes[AttributeCategory::other].erase("goal");
  CHECK_THROWS_AS(validate_campaign(no_goal), Error);

  auto dup = ok;
  dup.attributes[AttributeCategory::backer]["country"] = std::string("FR");
  CHECK_THROWS_AS(validate_campaign(dup), Error);
}

TEST_CASE("tagging writes p_pos into texted reviews") {
  const SentimentModel model({"good", "bad"}, {2.0, -2.0}, 0.0);
  std::vector<Campaign> cs{make_campaign("a", {1, 2})};
  cs[0].days[0].reviews.push_back({1, "good good", std::nullopt});
  cs[0].days[1].reviews.push_back({2, "bad", std::nullopt});
  CHECK(tag_reviews(cs, model) == 2);
  CHECK(*cs[0].days[0].reviews[0].p_pos == model.classify("good good"));
  CHECK(*cs[0].days[1].reviews[0].p_pos < 0.5);
}
