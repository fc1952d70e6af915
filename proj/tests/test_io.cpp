// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <filesystem>

#include "dct/datagen.hpp"
#include "dct/error.hpp"
#include "dct/io.hpp"
#include "helpers.hpp"

using namespace dct;
namespace fs = std::filesystem;

namespace {

std::vector<Campaign> tagged_sample() {
  GenConfig g;
  g.n_campaigns = 12;
  g.duration_min = 3;
  g.duration_max = 6;
  g.seed = 77;
  auto data = generate(g);
  tag_reviews(data.campaigns, train_sentiment(data.corpus, 5, 0.5, 1));
  return data.campaigns;
}

}  // namespace

TEST_CASE("campaign JSONL round trip") {
  auto campaigns = tagged_sample();
  campaigns[1].outcome.reset();
  campaigns[2].days[0].reviews.push_back({1, "", 0.25});
  const auto text = io::campaigns_to_jsonl(campaigns);
  const auto back = io::campaigns_from_jsonl(text);
  REQUIRE(back.size() == campaigns.size());
  CHECK(io::campaigns_to_jsonl(back) == text);
  CHECK_FALSE(back[1].outcome.has_value());
  CHECK(back[0].days[0].funds_received == campaigns[0].days[0].funds_received);
  CHECK(back[2].days[0].reviews.back().text.empty());
  CHECK(*back[2].days[0].reviews.back().p_pos == 0.25);
  for (auto cat : kAttributeCategories)
    CHECK(back[0].attributes[cat] == campaigns[0].attributes[cat]);

  // Blank lines are tolerated, trailing or not.
  CHECK(io::campaigns_from_jsonl(text + "\n\n").size() == campaigns.size());
}

TEST_CASE("campaign parsing errors") {
  const auto line = io::campaign_to_json(testing::make_campaign("a", {1.0, 2.0}));
  CHECK_NOTHROW(io::campaign_from_json(line));
  CHECK_THROWS_AS(io::campaigns_from_jsonl(line + "\n" + line + "\n"), Error);
  CHECK_THROWS_AS(io::campaign_from_json("{not json"), Error);
  CHECK_THROWS_AS(io::campaign_from_json(R"({"id":"a"})"), Error);

  auto bad_days = testing::make_campaign("b", {1.0, 2.0});
  bad_days.days.pop_back();
  CHECK_THROWS_AS(io::campaign_from_json(io::campaign_to_json(bad_days)), Error);

  std::string bad_outcome = line;
  bad_outcome.replace(bad_outcome.find("\"success\""), 9, "\"maybe\"");
  CHECK_THROWS_AS(io::campaign_from_json(bad_outcome), Error);

  const std::string empty_review =
      R"({"id":"c","static":{"owner":{},"backer":{},"perks":{},"other":{"goal":10,"duration":1}},)"
      R"("days":[{"day":1,"funds":0,"reviews":[{}]}],"outcome":null})";
  CHECK_THROWS_AS(io::campaign_from_json(empty_review), Error);
}

TEST_CASE("corpus round trip") {
  const std::vector<LabeledDocument> corpus{{"great stuff", Polarity::positive},
                                            {"awful, broken!", Polarity::negative}};
  const auto text = io::corpus_to_jsonl(corpus);
  const auto back = io::corpus_from_jsonl(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].text == "great stuff");
  CHECK(back[1].label == Polarity::negative);
  CHECK_THROWS_AS(io::corpus_from_jsonl(R"({"text":"x","label":"meh"})"), Error);
  CHECK_THROWS_AS(io::corpus_from_jsonl(R"({"text":"...","label":"pos"})"), Error);
}

TEST_CASE("sentiment model round trip") {
  GenConfig g;
  g.corpus_size = 60;
  const auto model = train_sentiment(generate(g).corpus, 7, 0.4, 5);
  const auto text = io::sentiment_model_to_json(model);
  const auto back = io::sentiment_model_from_json(text);
  CHECK(back.weights() == model.weights());
  CHECK(back.vocabulary() == model.vocabulary());
  CHECK(back.meta().epochs == 7);
  CHECK(back.meta().seed == 5);
  CHECK(io::sentiment_model_to_json(back) == text);
  CHECK_THROWS_AS(io::sentiment_model_from_json(R"({"version":2,"vocab":[],"weights":[],"bias":0})"),
                  Error);
}

TEST_CASE("checkpoint round trip is exact") {
  const auto campaigns = tagged_sample();
  const auto schema = fit_schema(campaigns);
  for (auto variant : {Variant::full, Variant::funds_only}) {
    const auto params = init_parameters(schema, variant, {5, 4, 9, false});
    const auto text = io::checkpoint_to_json(params);
    const auto back = io::checkpoint_from_json(text);
    CHECK(back.variant == variant);
    CHECK(back.network == params.network);
    CHECK(back.schema.static_width() == schema.static_width());
    CHECK(io::checkpoint_to_json(back) == text);
    CHECK(forward(campaigns[0], 2, back).p_success == forward(campaigns[0], 2, params).p_success);
  }

  auto text = io::checkpoint_to_json(init_parameters(schema, Variant::full, {}));
  auto wrong_version = text;
  wrong_version.replace(wrong_version.find("\"version\":1"), 11, "\"version\":9");
  CHECK_THROWS_AS(io::checkpoint_from_json(wrong_version), Error);
  auto missing = text;
  missing.replace(missing.find("lstm.candidate.bias"), 19, "lstm.candidate.xxxx");
  CHECK_THROWS_AS(io::checkpoint_from_json(missing), Error);
}

TEST_CASE("schema round trip") {
  auto campaigns = tagged_sample();
  const auto schema = fit_schema(campaigns, 10);
  const auto back = io::schema_from_json(io::schema_to_json(schema));
  CHECK(back.bucket_count == 10);
  REQUIRE(back.attributes.size() == schema.attributes.size());
  for (const auto &c : campaigns)
    CHECK(encode_static(c.attributes, back) == encode_static(c.attributes, schema));
}

TEST_CASE("configuration files") {
  const auto g = io::gen_config_from_json(R"({"n_campaigns": 50, "seed": 9})");
  CHECK(g.n_campaigns == 50);
  CHECK(g.seed == 9);
  CHECK(g.base_success_rate == 0.40);
  CHECK(io::gen_config_from_json(io::gen_config_to_json(g)).n_campaigns == 50);
  CHECK_THROWS_AS(io::gen_config_from_json(R"({"n_campaign": 50})"), Error);
  CHECK_THROWS_AS(io::gen_config_from_json(R"({"duration_min": 1})"), Error);
  CHECK_THROWS_AS(io::gen_config_from_json(R"([1,2])"), Error);

  const auto t = io::train_config_from_json(R"({"epochs": 3, "aux_weight": 0.5})");
  CHECK(t.epochs == 3);
  CHECK(t.aux_weight == 0.5);
  CHECK(t.batch_size == 16);
  CHECK(io::train_config_from_json(io::train_config_to_json(t)).aux_weight == 0.5);
  CHECK_THROWS_AS(io::train_config_from_json(R"({"epochs": 0})"), Error);
  CHECK_THROWS_AS(io::train_config_from_json(R"({"momentum": 0.9})"), Error);
  CHECK_THROWS_AS(io::train_config_from_json(R"({"epochs": "ten"})"), Error);
}

TEST_CASE("CSV formats") {
  CHECK(io::format_fixed(0.5) == "0.500000");
  CHECK(io::format_fixed(1.0 / 3.0) == "0.333333");

  TrackingCurve curve;
  curve.points.push_back({1, 0.25, 0.5, Emotion::none, 0.0});
  curve.points.push_back({2, 0.75, 0.125, Emotion::neg, 0.91});
  CHECK(io::tracking_curve_csv(curve) ==
        "day,p_success_full,p_success_funds_only,emotion,emotion_prob\n"
        "1,0.250000,0.500000,none,0.000000\n"
        "2,0.750000,0.125000,neg,0.910000\n");

  const std::vector<DailySentimentStats> stats{{5, 0, 0}, {6, 10, 6}, {7, 1, 3}};
  CHECK(io::tile_stats_csv(stats) == "day,n_pos,n_neg\n5,0,0\n6,10,6\n7,1,3\n");
  CHECK(io::stack_stats_csv(stats) ==
        "day,n_total,frac_pos,frac_neg\n"
        "5,0,0.000000,0.000000\n"
        "6,16,0.625000,0.375000\n"
        "7,4,0.250000,0.750000\n");
  CHECK(io::loss_history_csv({0.7, 0.5}) == "epoch,loss\n1,0.700000\n2,0.500000\n");
}

TEST_CASE("files and digests") {
  CHECK(io::sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(io::sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

  const auto dir = fs::temp_directory_path() / "dct_io_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto path = dir / "a.txt";
  io::write_file_atomic(path, "first");
  io::write_file_atomic(path, "second");
  CHECK(io::read_file(path) == "second");
  CHECK_FALSE(fs::exists(dir / "a.txt.tmp"));
  CHECK_THROWS_AS(io::read_file(dir / "missing.txt"), Error);
  io::write_file_atomic(dir / "nested" / "dir" / "b.txt", "x");
  CHECK(io::read_file(dir / "nested" / "dir" / "b.txt") == "x");
  CHECK_THROWS(io::write_file_atomic(path / "under_a_file.txt", "x"));
  fs::remove_all(dir);
}
