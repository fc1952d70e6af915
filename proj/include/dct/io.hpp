// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dct/datagen.hpp"
#include "dct/features.hpp"
#include "dct/sentiment.hpp"
#include "dct/tracker.hpp"

namespace dct::io {

inline constexpr int kFormatVersion = 1;

// Campaign dataset, one JSON object per line:
// {"id", "static": {"owner": {...}, "backer": {...}, "perks": {...}, "other": {...}},
//  "days": [{"day", "funds", "reviews": [{"text"?, "p_pos"?}]}],
//  "outcome": "success" | "failure" | null}
std::string campaign_to_json(const Campaign &campaign);
Campaign campaign_from_json(std::string_view line);
std::string campaigns_to_jsonl(const std::vector<Campaign> &campaigns);
std::vector<Campaign> campaigns_from_jsonl(std::string_view text);

// Sentiment corpus, {"text": ..., "label": "pos" | "neg"} per line.
std::string corpus_to_jsonl(const std::vector<LabeledDocument> &corpus);
std::vector<LabeledDocument> corpus_from_jsonl(std::string_view text);

// {"version": 1, "vocab": [...], "weights": [...], "bias": b, "meta": {...}}
std::string sentiment_model_to_json(const SentimentModel &model);
SentimentModel sentiment_model_from_json(std::string_view text);

std::string schema_to_json(const FeatureSchema &schema);
FeatureSchema schema_from_json(std::string_view text);

// {"version": 1, "variant", "sizes", "schema", "tensors": {name: {"shape", "data"}}}
// with tensors in the network's fixed order.
std::string checkpoint_to_json(const DctParameters &params);
DctParameters checkpoint_from_json(std::string_view text);

// Configuration files; absent keys keep their defaults, unknown keys are
// rejected.
GenConfig gen_config_from_json(std::string_view text);
std::string gen_config_to_json(const GenConfig &config);
TrainConfig train_config_from_json(std::string_view text);
std::string train_config_to_json(const TrainConfig &config);

// CSV emitters, numbers at six decimal places.
std::string format_fixed(double value);
std::string tracking_curve_csv(const TrackingCurve &curve);
std::string tile_stats_csv(const std::vector<DailySentimentStats> &stats);
std::string stack_stats_csv(const std::vector<DailySentimentStats> &stats);
std::string loss_history_csv(const std::vector<double> &history);

std::string read_file(const std::filesystem::path &path);
/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path &path, std::string_view content);
std::string sha256_hex(std::string_view content);

}  // namespace dct::io
