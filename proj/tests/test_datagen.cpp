// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <set>

#include "dct/datagen.hpp"
#include "dct/error.hpp"
#include "dct/io.hpp"

using namespace dct;

TEST_CASE("generated campaigns are valid") {
  GenConfig g;
  g.n_campaigns = 120;
  g.seed = 3;
  const auto data = generate(g);
  REQUIRE(data.campaigns.size() == 120);
  std::set<std::string> ids;
  for (const auto &c : data.campaigns) {
    CHECK_NOTHROW(validate_campaign(c));
    CHECK(ids.insert(c.id).second);
    CHECK(c.outcome.has_value());
    CHECK(c.days.size() >= 10);
    CHECK(c.days.size() <= 30);
    CHECK(static_cast<int>(c.days.size()) == c.attributes.duration());
    for (auto cat : kAttributeCategories) CHECK(c.attributes[cat].size() == 5);
    for (const auto &d : c.days)
      for (const auto &r : d.reviews) {
        CHECK_FALSE(r.p_pos.has_value());
        CHECK_FALSE(tokenize(r.text).empty());
      }
  }
  CHECK(data.corpus.size() == g.corpus_size);
  CHECK(fit_schema(data.campaigns).attributes.size() == 20);
}

TEST_CASE("generation is deterministic per seed") {
  GenConfig g;
  g.n_campaigns = 40;
  g.seed = 21;
  const auto a = generate(g), b = generate(g);
  CHECK(io::campaigns_to_jsonl(a.campaigns) == io::campaigns_to_jsonl(b.campaigns));
  CHECK(io::corpus_to_jsonl(a.corpus) == io::corpus_to_jsonl(b.corpus));
  g.seed = 22;
  CHECK(io::campaigns_to_jsonl(generate(g).campaigns) != io::campaigns_to_jsonl(a.campaigns));
}

TEST_CASE("success count follows the base rate") {
  GenConfig g;
  g.n_campaigns = 500;
  g.base_success_rate = 0.40;
  g.seed = 5;
  const auto data = generate(g);
  int wins = 0;
  for (const auto &c : data.campaigns) wins += c.outcome == Outcome::success;
  CHECK(wins >= 160);
  CHECK(wins <= 240);
}

TEST_CASE("review polarity follows the outcome") {
  GenConfig g;
  g.n_campaigns = 200;
  g.sentiment_signal = 1.0;
  g.seed = 8;
  const auto data = generate(g);
  const std::set<std::string> pos(g.positive_words.begin(), g.positive_words.end());
  const std::set<std::string> neg(g.negative_words.begin(), g.negative_words.end());
  for (const auto &c : data.campaigns)
    for (const auto &d : c.days)
      for (const auto &r : d.reviews) {
        bool has_pos = false, has_neg = false;
        for (const auto &tok : tokenize(r.text)) {
          has_pos |= pos.count(tok) > 0;
          has_neg |= neg.count(tok) > 0;
        }
        CHECK(has_pos != has_neg);
        CHECK(has_pos == (c.outcome == Outcome::success));
      }
}

TEST_CASE("funds follow the outcome") {
  GenConfig g;
  g.n_campaigns = 300;
  g.funds_signal = 1.0;
  g.seed = 2;
  const auto data = generate(g);
  double ratio_win = 0.0, ratio_loss = 0.0;
  int n_win = 0, n_loss = 0;
  for (const auto &c : data.campaigns) {
    double total = 0.0;
    for (const auto &d : c.days) {
      CHECK(d.funds_received >= 0.0);
      total += d.funds_received;
    }
    const double ratio = total / c.attributes.goal();
    if (c.outcome == Outcome::success) {
      ratio_win += ratio;
      ++n_win;
    } else {
      ratio_loss += ratio;
      ++n_loss;
    }
  }
  CHECK(ratio_win / n_win > 2.0 * (ratio_loss / n_loss));
}

TEST_CASE("marker corpus is separable") {
  GenConfig g;
  g.seed = 4;
  const auto data = generate(g);
  std::size_t n_pos = 0;
  for (const auto &d : data.corpus) n_pos += d.label == Polarity::positive;
  CHECK(n_pos > 0);
  CHECK(n_pos < data.corpus.size());

  const std::vector<LabeledDocument> train(data.corpus.begin(), data.corpus.begin() + 300);
  const std::vector<LabeledDocument> test(data.corpus.begin() + 300, data.corpus.end());
  const auto model = train_sentiment(train, 30, 0.5, 4);
  std::size_t correct = 0;
  for (const auto &d : test) correct += polarity_of(model.classify(d.text)) == d.label;
  CHECK(static_cast<double>(correct) / static_cast<double>(test.size()) >= 0.9);
}

TEST_CASE("configuration errors") {
  auto check_bad = [](auto mutate) {
    GenConfig g;
    mutate(g);
    CHECK_THROWS_AS(generate(g), Error);
  };
  check_bad([](GenConfig &g) { g.n_campaigns = 0; });
  check_bad([](GenConfig &g) { g.duration_min = 2; });
  check_bad([](GenConfig &g) { g.duration_max = 5; });
  check_bad([](GenConfig &g) { g.base_success_rate = 1.0; });
  check_bad([](GenConfig &g) { g.base_success_rate = 0.0; });
  check_bad([](GenConfig &g) { g.sentiment_signal = 1.5; });
  check_bad([](GenConfig &g) { g.funds_signal = -0.1; });
  check_bad([](GenConfig &g) { g.reviews_per_day = -1.0; });
  check_bad([](GenConfig &g) { g.positive_words.clear(); });
  check_bad([](GenConfig &g) { g.negative_words.push_back("great"); });
  check_bad([](GenConfig &g) { g.corpus_size = 1; });
}
