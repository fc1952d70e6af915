// SPDX-License-Identifier: Apache-2.0
#include "dct/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "dct/error.hpp"
#include "json.hpp"

namespace dct::io {

namespace {

using json = nlohmann::ordered_json;

json parse(std::string_view text, const std::string &what) {
  try {
    return json::parse(text);
  } catch (const json::exception &e) {
    throw Error("malformed " + what + ": " + e.what());
  }
}

template <typename T>
T get(const json &obj, const char *key, const std::string &what) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(what + ": missing key '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception &) {
    throw Error(what + ": key '" + key + "' has the wrong type");
  }
}

void reject_unknown_keys(const json &obj, const std::set<std::string> &allowed,
                         const std::string &what) {
  if (!obj.is_object()) throw Error(what + " must be a JSON object");
  for (const auto &item : obj.items())
    if (!allowed.count(item.key())) throw Error(what + ": unknown key '" + item.key() + "'");
}

template <typename T>
void read_optional(const json &obj, const char *key, T &target, const std::string &what) {
  if (obj.contains(key)) target = get<T>(obj, key, what);
}

template <typename Fn>
auto parse_lines(std::string_view text, const std::string &what, Fn &&fn) {
  std::vector<decltype(fn(json{}))> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = what + " line " + std::to_string(line_no);
    out.push_back(fn(parse(line, where)));
  }
  return out;
}

json tensor_to_json(const nn::Tensor &t) {
  return json{{"shape", t.shape()}, {"data", t.data()}};
}

nn::Tensor tensor_from_json(const json &obj, const std::string &what) {
  auto shape = get<std::vector<std::size_t>>(obj, "shape", what);
  auto data = get<std::vector<double>>(obj, "data", what);
  return nn::Tensor(std::move(shape), std::move(data));
}

json schema_json(const FeatureSchema &schema) {
  json attrs = json::array();
  for (const auto &a : schema.attributes) {
    json entry{{"category", to_string(a.category)}, {"name", a.name}};
    if (a.kind == AttributeKind::numeric) {
      entry["kind"] = "numeric";
      entry["min"] = a.min;
      entry["max"] = a.max;
    } else {
      entry["kind"] = "categorical";
      entry["levels"] = a.levels;
    }
    attrs.push_back(std::move(entry));
  }
  return json{{"bucket_count", schema.bucket_count}, {"attributes", std::move(attrs)}};
}

FeatureSchema schema_from(const json &obj) {
  const std::string what = "feature schema";
  FeatureSchema schema;
  schema.bucket_count = get<std::size_t>(obj, "bucket_count", what);
  if (schema.bucket_count < 2) throw Error(what + ": bucket_count must be at least 2");
  for (const auto &entry : get<json>(obj, "attributes", what)) {
    AttributeSpec spec;
    spec.category = category_from_string(get<std::string>(entry, "category", what));
    spec.name = get<std::string>(entry, "name", what);
    const auto kind = get<std::string>(entry, "kind", what);
    if (kind == "numeric") {
      spec.kind = AttributeKind::numeric;
      spec.min = get<double>(entry, "min", what);
      spec.max = get<double>(entry, "max", what);
      if (spec.min > spec.max) throw Error(what + ": min above max for '" + spec.name + "'");
    } else if (kind == "categorical") {
      spec.kind = AttributeKind::categorical;
      spec.levels = get<std::vector<std::string>>(entry, "levels", what);
      if (spec.levels.empty()) throw Error(what + ": no levels for '" + spec.name + "'");
    } else {
      throw Error(what + ": unknown attribute kind '" + kind + "'");
    }
    schema.attributes.push_back(std::move(spec));
  }
  return schema;
}

}  // namespace

std::string campaign_to_json(const Campaign &campaign) {
  json statics = json::object();
  for (auto category : kAttributeCategories) {
    json group = json::object();
    for (const auto &[name, value] : campaign.attributes[category]) {
      if (const double *v = std::get_if<double>(&value))
        group[name] = *v;
      else
        group[name] = std::get<std::string>(value);
    }
    statics[to_string(category)] = std::move(group);
  }

  json days = json::array();
  for (const auto &record : campaign.days) {
    json reviews = json::array();
    for (const auto &review : record.reviews) {
      json r = json::object();
      if (!review.text.empty()) r["text"] = review.text;
      if (review.p_pos) r["p_pos"] = *review.p_pos;
      reviews.push_back(std::move(r));
    }
    days.push_back(json{{"day", record.day},
                        {"funds", record.funds_received},
                        {"reviews", std::move(reviews)}});
  }

  json outcome = nullptr;
  if (campaign.outcome) outcome = *campaign.outcome == Outcome::success ? "success" : "failure";
  return json{{"id", campaign.id},
              {"static", std::move(statics)},
              {"days", std::move(days)},
              {"outcome", std::move(outcome)}}
      .dump();
}

namespace {

Campaign campaign_from(const json &obj) {
  std::string what = "campaign";
  Campaign c;
  c.id = get<std::string>(obj, "id", what);
  what = "campaign '" + c.id + "'";

  const json statics = get<json>(obj, "static", what);
  if (!statics.is_object()) throw Error(what + ": 'static' must be an object");
  for (const auto &item : statics.items()) {
    const auto category = category_from_string(item.key());
    if (!item.value().is_object())
      throw Error(what + ": static group '" + item.key() + "' must be an object");
    for (const auto &attr : item.value().items()) {
      if (attr.value().is_number())
        c.attributes[category][attr.key()] = attr.value().get<double>();
      else if (attr.value().is_string())
        c.attributes[category][attr.key()] = attr.value().get<std::string>();
      else
        throw Error(what + ": attribute '" + attr.key() + "' must be a number or string");
    }
  }

  for (const auto &day : get<json>(obj, "days", what)) {
    DailyRecord record;
    record.day = get<int>(day, "day", what);
    record.funds_received = get<double>(day, "funds", what);
    if (day.contains("reviews")) {
      for (const auto &r : day.at("reviews")) {
        Review review;
        review.day = record.day;
        if (r.contains("text")) review.text = get<std::string>(r, "text", what);
        if (r.contains("p_pos")) review.p_pos = get<double>(r, "p_pos", what);
        if (!r.contains("text") && !review.p_pos)
          throw Error(what + ": review needs 'text' or 'p_pos'");
        record.reviews.push_back(std::move(review));
      }
    }
    c.days.push_back(std::move(record));
  }

  if (obj.contains("outcome") && !obj.at("outcome").is_null()) {
    const auto outcome = get<std::string>(obj, "outcome", what);
    if (outcome == "success")
      c.outcome = Outcome::success;
    else if (outcome == "failure")
      c.outcome = Outcome::failure;
    else
      throw Error(what + ": outcome must be success, failure or null");
  }
  validate_campaign(c);
  return c;
}

}  // namespace

Campaign campaign_from_json(std::string_view line) {
  return campaign_from(parse(line, "campaign"));
}

std::string campaigns_to_jsonl(const std::vector<Campaign> &campaigns) {
  std::string out;
  for (const auto &c : campaigns) {
    out += campaign_to_json(c);
    out += '\n';
  }
  return out;
}

std::vector<Campaign> campaigns_from_jsonl(std::string_view text) {
  auto campaigns = parse_lines(text, "campaign dataset", campaign_from);
  std::set<std::string> ids;
  for (const auto &c : campaigns)
    if (!ids.insert(c.id).second) throw Error("duplicate campaign id '" + c.id + "'");
  return campaigns;
}

std::string corpus_to_jsonl(const std::vector<LabeledDocument> &corpus) {
  std::string out;
  for (const auto &doc : corpus) {
    out += json{{"text", doc.text}, {"label", doc.label == Polarity::positive ? "pos" : "neg"}}
               .dump();
    out += '\n';
  }
  return out;
}

std::vector<LabeledDocument> corpus_from_jsonl(std::string_view text) {
  return parse_lines(text, "sentiment corpus", [](const json &obj) {
    const std::string what = "sentiment corpus";
    LabeledDocument doc;
    doc.text = get<std::string>(obj, "text", what);
    const auto label = get<std::string>(obj, "label", what);
    if (label == "pos")
      doc.label = Polarity::positive;
    else if (label == "neg")
      doc.label = Polarity::negative;
    else
      throw Error(what + ": label must be pos or neg");
    if (tokenize(doc.text).empty()) throw Error(what + ": document has no tokens");
    return doc;
  });
}

std::string sentiment_model_to_json(const SentimentModel &model) {
  const auto &w = model.weights();
  std::vector<double> token_weights(w.begin(), w.end() - 1);
  const auto &meta = model.meta();
  return json{{"version", kFormatVersion},
              {"vocab", model.tokens_by_index()},
              {"weights", token_weights},
              {"bias", model.bias()},
              {"meta",
               {{"corpus_size", meta.corpus_size}, {"epochs", meta.epochs}, {"seed", meta.seed}}}}
      .dump();
}

SentimentModel sentiment_model_from_json(std::string_view text) {
  const std::string what = "sentiment model";
  const json obj = parse(text, what);
  if (get<int>(obj, "version", what) != kFormatVersion)
    throw Error(what + ": unsupported version");
  SentimentTrainingMeta meta;
  if (obj.contains("meta")) {
    const json &m = obj.at("meta");
    read_optional(m, "corpus_size", meta.corpus_size, what);
    read_optional(m, "epochs", meta.epochs, what);
    read_optional(m, "seed", meta.seed, what);
  }
  return SentimentModel(get<std::vector<std::string>>(obj, "vocab", what),
                        get<std::vector<double>>(obj, "weights", what),
                        get<double>(obj, "bias", what), meta);
}

std::string schema_to_json(const FeatureSchema &schema) { return schema_json(schema).dump(); }

FeatureSchema schema_from_json(std::string_view text) {
  return schema_from(parse(text, "feature schema"));
}

std::string checkpoint_to_json(const DctParameters &params) {
  const auto sizes = params.sizes();
  json tensors = json::object();
  for (const auto &[name, tensor] : params.network.named()) tensors[name] = tensor_to_json(*tensor);
  return json{{"version", kFormatVersion},
              {"variant", to_string(params.variant)},
              {"sizes",
               {{"static_input", sizes.static_input},
                {"static_dim", sizes.static_dim},
                {"hidden", sizes.hidden},
                {"daily_input", sizes.daily_input}}},
              {"schema", schema_json(params.schema)},
              {"tensors", std::move(tensors)}}
      .dump();
}

DctParameters checkpoint_from_json(std::string_view text) {
  const std::string what = "checkpoint";
  const json obj = parse(text, what);
  if (get<int>(obj, "version", what) != kFormatVersion) throw Error(what + ": unsupported version");
  DctParameters params;
  params.variant = variant_from_string(get<std::string>(obj, "variant", what));
  params.schema = schema_from(get<json>(obj, "schema", what));
  const json sizes_obj = get<json>(obj, "sizes", what);
  const nn::NetworkSizes sizes{get<std::size_t>(sizes_obj, "static_input", what),
                               get<std::size_t>(sizes_obj, "static_dim", what),
                               get<std::size_t>(sizes_obj, "hidden", what),
                               get<std::size_t>(sizes_obj, "daily_input", what)};
  params.network = nn::zero_network(sizes);
  const json tensors = get<json>(obj, "tensors", what);
  for (auto &[name, tensor] : params.network.named()) {
    if (!tensors.contains(name)) throw Error(what + ": missing tensor '" + name + "'");
    *tensor = tensor_from_json(tensors.at(name), what + " tensor '" + name + "'");
  }
  nn::check_shapes(params.network, sizes);
  if (sizes.static_input != params.schema.static_width() ||
      sizes.daily_input != daily_input_width(params.schema, params.variant))
    throw Error(what + ": sizes do not match the stored schema");
  return params;
}

GenConfig gen_config_from_json(std::string_view text) {
  const std::string what = "generator config";
  const json obj = parse(text, what);
  reject_unknown_keys(obj,
                      {"n_campaigns", "duration_min", "duration_max", "base_success_rate",
                       "sentiment_signal", "funds_signal", "reviews_per_day", "positive_words",
                       "negative_words", "filler_words", "corpus_size", "seed"},
                      what);
  GenConfig c;
  read_optional(obj, "n_campaigns", c.n_campaigns, what);
  read_optional(obj, "duration_min", c.duration_min, what);
  read_optional(obj, "duration_max", c.duration_max, what);
  read_optional(obj, "base_success_rate", c.base_success_rate, what);
  read_optional(obj, "sentiment_signal", c.sentiment_signal, what);
  read_optional(obj, "funds_signal", c.funds_signal, what);
  read_optional(obj, "reviews_per_day", c.reviews_per_day, what);
  read_optional(obj, "positive_words", c.positive_words, what);
  read_optional(obj, "negative_words", c.negative_words, what);
  read_optional(obj, "filler_words", c.filler_words, what);
  read_optional(obj, "corpus_size", c.corpus_size, what);
  read_optional(obj, "seed", c.seed, what);
  validate(c);
  return c;
}

std::string gen_config_to_json(const GenConfig &c) {
  return json{{"n_campaigns", c.n_campaigns},
              {"duration_min", c.duration_min},
              {"duration_max", c.duration_max},
              {"base_success_rate", c.base_success_rate},
              {"sentiment_signal", c.sentiment_signal},
              {"funds_signal", c.funds_signal},
              {"reviews_per_day", c.reviews_per_day},
              {"positive_words", c.positive_words},
              {"negative_words", c.negative_words},
              {"filler_words", c.filler_words},
              {"corpus_size", c.corpus_size},
              {"seed", c.seed}}
      .dump();
}

TrainConfig train_config_from_json(std::string_view text) {
  const std::string what = "train config";
  const json obj = parse(text, what);
  reject_unknown_keys(obj,
                      {"epochs", "learning_rate", "batch_size", "aux_weight", "seed", "clip_norm",
                       "static_dim", "hidden_dim", "zero_heads", "bucket_count"},
                      what);
  TrainConfig c;
  read_optional(obj, "epochs", c.epochs, what);
  read_optional(obj, "learning_rate", c.learning_rate, what);
  read_optional(obj, "batch_size", c.batch_size, what);
  read_optional(obj, "aux_weight", c.aux_weight, what);
  read_optional(obj, "seed", c.seed, what);
  read_optional(obj, "clip_norm", c.clip_norm, what);
  read_optional(obj, "static_dim", c.static_dim, what);
  read_optional(obj, "hidden_dim", c.hidden_dim, what);
  read_optional(obj, "zero_heads", c.zero_heads, what);
  read_optional(obj, "bucket_count", c.bucket_count, what);
  validate(c);
  return c;
}

std::string train_config_to_json(const TrainConfig &c) {
  return json{{"epochs", c.epochs},         {"learning_rate", c.learning_rate},
              {"batch_size", c.batch_size}, {"aux_weight", c.aux_weight},
              {"seed", c.seed},             {"clip_norm", c.clip_norm},
              {"static_dim", c.static_dim}, {"hidden_dim", c.hidden_dim},
              {"zero_heads", c.zero_heads}, {"bucket_count", c.bucket_count}}
      .dump();
}

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

std::string tracking_curve_csv(const TrackingCurve &curve) {
  std::string out = "day,p_success_full,p_success_funds_only,emotion,emotion_prob\n";
  for (const auto &p : curve.points) {
    out += std::to_string(p.day) + ',' + format_fixed(p.p_success_full) + ',' +
           format_fixed(p.p_success_funds_only) + ',' + to_string(p.emotion) + ',' +
           format_fixed(p.emotion_prob) + '\n';
  }
  return out;
}

std::string tile_stats_csv(const std::vector<DailySentimentStats> &stats) {
  std::string out = "day,n_pos,n_neg\n";
  for (const auto &s : stats)
    out += std::to_string(s.day) + ',' + std::to_string(s.n_pos) + ',' +
           std::to_string(s.n_neg) + '\n';
  return out;
}

std::string stack_stats_csv(const std::vector<DailySentimentStats> &stats) {
  std::string out = "day,n_total,frac_pos,frac_neg\n";
  for (const auto &s : stats) {
    const std::size_t total = s.n_pos + s.n_neg;
    const double frac_pos = total ? static_cast<double>(s.n_pos) / static_cast<double>(total) : 0.0;
    const double frac_neg = total ? static_cast<double>(s.n_neg) / static_cast<double>(total) : 0.0;
    out += std::to_string(s.day) + ',' + std::to_string(total) + ',' + format_fixed(frac_pos) +
           ',' + format_fixed(frac_neg) + '\n';
  }
  return out;
}

std::string loss_history_csv(const std::vector<double> &history) {
  std::string out = "epoch,loss\n";
  for (std::size_t i = 0; i < history.size(); ++i)
    out += std::to_string(i + 1) + ',' + format_fixed(history[i]) + '\n';
  return out;
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path &path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string sha256_hex(std::string_view content) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(content.data(), content.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

}  // namespace dct::io
