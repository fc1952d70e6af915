// SPDX-License-Identifier: Apache-2.0
#include "dct/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "dct/datagen.hpp"
#include "dct/error.hpp"
#include "dct/io.hpp"
#include "dct/nn/gradcheck.hpp"
#include "dct/sentiment.hpp"
#include "dct/tracker.hpp"
#include "json.hpp"

namespace dct::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

void configure_logging() {
  static const auto logger = [] {
    auto l = spdlog::stderr_color_mt("dct");
    spdlog::set_default_logger(l);
    return l;
  }();
  const char *env = std::getenv("DCT_LOG");
  const std::string level = env ? env : "info";
  if (level == "quiet")
    logger->set_level(spdlog::level::err);
  else if (level == "debug")
    logger->set_level(spdlog::level::debug);
  else
    logger->set_level(spdlog::level::info);
}

struct OutputFile {
  fs::path path;
  std::string content;
};

/// Writes every output atomically, then the manifest describing them.
void commit(const std::vector<OutputFile> &outputs, const fs::path &manifest_path,
            const std::string &command, const json &config, std::optional<std::uint64_t> seed,
            const std::vector<fs::path> &inputs, Clock::time_point started) {
  json outs = json::array();
  for (const auto &o : outputs) {
    io::write_file_atomic(o.path, o.content);
    outs.push_back({{"path", o.path.string()}, {"sha256", io::sha256_hex(o.content)}});
    spdlog::info("wrote {}", o.path.string());
  }
  json ins = json::array();
  for (const auto &p : inputs) ins.push_back(p.string());
  const double seconds = std::chrono::duration<double>(Clock::now() - started).count();
  const json manifest{{"command", command},
                      {"config", config},
                      {"seed", seed ? json(*seed) : json(nullptr)},
                      {"inputs", std::move(ins)},
                      {"outputs", std::move(outs)},
                      {"duration_seconds", seconds}};
  io::write_file_atomic(manifest_path, manifest.dump(2) + "\n");
}

fs::path sibling(const fs::path &path, const std::string &suffix) {
  auto out = path;
  out.replace_extension(suffix);
  return out;
}

const Campaign &find_campaign(const std::vector<Campaign> &campaigns, const std::string &id) {
  auto it = std::find_if(campaigns.begin(), campaigns.end(),
                         [&](const Campaign &c) { return c.id == id; });
  if (it == campaigns.end()) throw Error("unknown campaign id '" + id + "'");
  return *it;
}

struct Options {
  std::string config;
  std::string data;
  std::string out;
  std::string model;
  std::vector<std::string> models;
  std::string variant = "full";
  std::string campaign;
  std::string pattern = "tile";
  std::optional<std::uint64_t> seed;
  bool force = false;
};

int cmd_simulate(const Options &opt) {
  const auto started = Clock::now();
  GenConfig config;
  std::vector<fs::path> inputs;
  if (!opt.config.empty()) {
    config = io::gen_config_from_json(io::read_file(opt.config));
    inputs.push_back(opt.config);
  }
  if (opt.seed) config.seed = *opt.seed;

  const fs::path dir = opt.out;
  const fs::path campaigns_path = dir / "campaigns.jsonl";
  const fs::path corpus_path = dir / "sentiment_corpus.jsonl";
  const fs::path manifest_path = dir / "manifest.json";
  if (!opt.force)
    for (const auto &p : {campaigns_path, corpus_path, manifest_path})
      if (fs::exists(p))
        throw Error("refusing to overwrite '" + p.string() + "' (pass --force)");

  const auto data = generate(config);
  commit({{campaigns_path, io::campaigns_to_jsonl(data.campaigns)},
          {corpus_path, io::corpus_to_jsonl(data.corpus)}},
         manifest_path, "simulate", json::parse(io::gen_config_to_json(config)), config.seed,
         inputs, started);
  return kExitOk;
}

struct SentimentTrainConfig {
  std::size_t epochs = 50;
  double learning_rate = 0.5;
  std::uint64_t seed = 0;
};

int cmd_sentiment_train(const Options &opt) {
  const auto started = Clock::now();
  SentimentTrainConfig config;
  std::vector<fs::path> inputs{opt.data};
  if (!opt.config.empty()) {
    const json obj = json::parse(io::read_file(opt.config));
    for (const auto &item : obj.items())
      if (item.key() != "epochs" && item.key() != "learning_rate" && item.key() != "seed")
        throw Error("sentiment config: unknown key '" + item.key() + "'");
    config.epochs = obj.value("epochs", config.epochs);
    config.learning_rate = obj.value("learning_rate", config.learning_rate);
    config.seed = obj.value("seed", config.seed);
    inputs.push_back(opt.config);
  }
  if (opt.seed) config.seed = *opt.seed;

  const auto corpus = io::corpus_from_jsonl(io::read_file(opt.data));
  const auto model = train_sentiment(corpus, config.epochs, config.learning_rate, config.seed);
  spdlog::info("sentiment vocabulary: {} tokens from {} documents", model.vocabulary().size(),
               corpus.size());
  const fs::path out = opt.out;
  commit({{out, io::sentiment_model_to_json(model) + "\n"}}, sibling(out, ".manifest.json"),
         "sentiment train",
         {{"epochs", config.epochs}, {"learning_rate", config.learning_rate}}, config.seed,
         inputs, started);
  return kExitOk;
}

int cmd_sentiment_tag(const Options &opt) {
  const auto started = Clock::now();
  const auto model = io::sentiment_model_from_json(io::read_file(opt.model));
  auto campaigns = io::campaigns_from_jsonl(io::read_file(opt.data));
  const std::size_t tagged = tag_reviews(campaigns, model);
  spdlog::info("tagged {} reviews", tagged);
  const fs::path out = opt.out;
  commit({{out, io::campaigns_to_jsonl(campaigns)}}, sibling(out, ".manifest.json"),
         "sentiment tag", json::object(), std::nullopt, {opt.model, opt.data}, started);
  return kExitOk;
}

int cmd_train(const Options &opt) {
  const auto started = Clock::now();
  TrainConfig config;
  std::vector<fs::path> inputs{opt.data};
  if (!opt.config.empty()) {
    config = io::train_config_from_json(io::read_file(opt.config));
    inputs.push_back(opt.config);
  }
  if (opt.seed) config.seed = *opt.seed;
  const Variant variant = variant_from_string(opt.variant);

  const auto campaigns = io::campaigns_from_jsonl(io::read_file(opt.data));
  if (campaigns.empty()) throw Error("train: dataset is empty");
  const auto schema = fit_schema(campaigns, config.bucket_count);
  const auto result = train(campaigns, schema, config, variant);
  spdlog::info("trained {} model: final loss {:.6f}", to_string(variant),
               result.loss_history.back());

  const fs::path out = opt.out;
  json echo = json::parse(io::train_config_to_json(config));
  echo["variant"] = to_string(variant);
  commit({{out, io::checkpoint_to_json(result.params) + "\n"},
          {sibling(out, ".loss.csv"), io::loss_history_csv(result.loss_history)}},
         sibling(out, ".manifest.json"), "train", echo, config.seed, inputs, started);
  return kExitOk;
}

int cmd_track(const Options &opt) {
  const auto started = Clock::now();
  if (opt.models.size() != 2)
    throw Error("track needs --model twice: one full and one funds-only checkpoint");
  std::optional<DctParameters> full, funds_only;
  for (const auto &path : opt.models) {
    auto params = io::checkpoint_from_json(io::read_file(path));
    auto &slot = params.variant == Variant::full ? full : funds_only;
    if (slot) throw Error("track: both checkpoints are the " + std::string(to_string(params.variant)) + " variant");
    slot = std::move(params);
  }

  const auto campaigns = io::campaigns_from_jsonl(io::read_file(opt.data));
  const auto &campaign = find_campaign(campaigns, opt.campaign);
  const auto curve = track(campaign, *full, *funds_only);

  const fs::path out = opt.out;
  std::vector<fs::path> inputs(opt.models.begin(), opt.models.end());
  inputs.push_back(opt.data);
  commit({{out, io::tracking_curve_csv(curve)}}, sibling(out, ".manifest.json"), "track",
         {{"campaign", opt.campaign}}, std::nullopt, inputs, started);
  return kExitOk;
}

int cmd_stats(const Options &opt) {
  const auto started = Clock::now();
  if (opt.pattern != "tile" && opt.pattern != "stack")
    throw Error("unknown pattern '" + opt.pattern + "' (expected tile or stack)");
  const auto campaigns = io::campaigns_from_jsonl(io::read_file(opt.data));
  const auto &campaign = find_campaign(campaigns, opt.campaign);
  std::vector<DailySentimentStats> stats;
  for (const auto &record : campaign.days) stats.push_back(aggregate_day(record));
  const std::string csv =
      opt.pattern == "tile" ? io::tile_stats_csv(stats) : io::stack_stats_csv(stats);

  const fs::path out = opt.out;
  commit({{out, csv}}, sibling(out, ".manifest.json"), "stats",
         {{"campaign", opt.campaign}, {"pattern", opt.pattern}}, std::nullopt, {opt.data},
         started);
  return kExitOk;
}

int cmd_gradcheck(const Options &opt, std::ostream &out) {
  nn::NetworkGradCheckSetup setup;
  setup.sizes = {6, 4, 3, 8};
  if (!opt.config.empty()) {
    const json obj = json::parse(io::read_file(opt.config));
    for (const auto &item : obj.items()) {
      const auto &k = item.key();
      if (k == "static_input") setup.sizes.static_input = item.value().get<std::size_t>();
      else if (k == "static_dim") setup.sizes.static_dim = item.value().get<std::size_t>();
      else if (k == "hidden") setup.sizes.hidden = item.value().get<std::size_t>();
      else if (k == "input") setup.sizes.daily_input = item.value().get<std::size_t>();
      else if (k == "days") setup.days = item.value().get<std::size_t>();
      else if (k == "aux_weight") setup.aux_weight = item.value().get<double>();
      else if (k == "epsilon") setup.epsilon = item.value().get<double>();
      else throw Error("gradcheck config: unknown key '" + k + "'");
    }
  }
  if (setup.sizes.static_input == 0 || setup.sizes.static_dim == 0 || setup.sizes.hidden == 0 ||
      setup.sizes.daily_input == 0)
    throw Error("gradcheck: sizes must be positive");
  if (opt.seed) setup.seed = *opt.seed;

  const auto report = nn::check_network_gradients(setup);
  json groups = json::array();
  bool ok = true;
  for (const auto &g : report.groups) {
    const bool pass = g.max_relative_error < kGradCheckThreshold;
    ok = ok && pass;
    groups.push_back({{"name", g.name},
                      {"checked", g.checked},
                      {"max_relative_error", g.max_relative_error},
                      {"pass", pass}});
  }
  const json doc{{"seed", setup.seed},
                 {"sizes",
                  {{"static_input", setup.sizes.static_input},
                   {"static_dim", setup.sizes.static_dim},
                   {"hidden", setup.sizes.hidden},
                   {"input", setup.sizes.daily_input},
                   {"days", setup.days}}},
                 {"epsilon", setup.epsilon},
                 {"threshold", kGradCheckThreshold},
                 {"groups", std::move(groups)},
                 {"max_relative_error", report.max_relative_error},
                 {"pass", ok}};
  const std::string text = doc.dump(2) + "\n";
  if (opt.out.empty())
    out << text;
  else
    io::write_file_atomic(opt.out, text);
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  configure_logging();
  CLI::App app{"Dynamic and cooperative success tracking for crowdfunding campaigns", "dct"};
  app.require_subcommand(1);
  Options opt;

  auto add_seed = [&](CLI::App *cmd) {
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t &s) { opt.seed = s; }, "Random seed");
  };

  auto *simulate = app.add_subcommand("simulate", "Generate a synthetic campaign corpus");
  simulate->add_option("--config", opt.config, "Generator config (JSON)");
  simulate->add_option("--out", opt.out, "Output directory")->required();
  simulate->add_flag("--force", opt.force, "Overwrite existing files");
  add_seed(simulate);

  auto *sentiment = app.add_subcommand("sentiment", "Review polarity classifier");
  sentiment->require_subcommand(1);
  auto *sent_train = sentiment->add_subcommand("train", "Train on a labelled JSONL corpus");
  sent_train->add_option("--data", opt.data, "Labelled corpus (JSONL)")->required();
  sent_train->add_option("--out", opt.out, "Model output (JSON)")->required();
  sent_train->add_option("--config", opt.config, "Training config (JSON)");
  add_seed(sent_train);
  auto *sent_tag = sentiment->add_subcommand("tag", "Write p_pos into every review");
  sent_tag->add_option("--model", opt.model, "Sentiment model (JSON)")->required();
  sent_tag->add_option("--data", opt.data, "Campaign dataset (JSONL)")->required();
  sent_tag->add_option("--out", opt.out, "Tagged dataset (JSONL)")->required();

  auto *train_cmd = app.add_subcommand("train", "Train a tracking model");
  train_cmd->add_option("--data", opt.data, "Campaign dataset (JSONL)")->required();
  train_cmd->add_option("--variant", opt.variant, "full or funds-only");
  train_cmd->add_option("--config", opt.config, "Training config (JSON)");
  train_cmd->add_option("--out", opt.out, "Checkpoint output (JSON)")->required();
  add_seed(train_cmd);

  auto *track_cmd = app.add_subcommand("track", "Emit a per-day tracking curve");
  track_cmd->add_option("--model", opt.models, "Full and funds-only checkpoints")
      ->required()
      ->expected(1, 2);
  track_cmd->add_option("--data", opt.data, "Campaign dataset (JSONL)")->required();
  track_cmd->add_option("--campaign", opt.campaign, "Campaign id")->required();
  track_cmd->add_option("--out", opt.out, "Curve output (CSV)")->required();

  auto *stats_cmd = app.add_subcommand("stats", "Emit daily review sentiment statistics");
  stats_cmd->add_option("--data", opt.data, "Tagged campaign dataset (JSONL)")->required();
  stats_cmd->add_option("--campaign", opt.campaign, "Campaign id")->required();
  stats_cmd->add_option("--pattern", opt.pattern, "tile or stack");
  stats_cmd->add_option("--out", opt.out, "Statistics output (CSV)")->required();

  auto *gradcheck_cmd = app.add_subcommand("gradcheck", "Check gradients by finite differences");
  gradcheck_cmd->add_option("--config", opt.config, "Sizes (JSON)");
  gradcheck_cmd->add_option("--out", opt.out, "Report output (JSON); stdout if omitted");
  add_seed(gradcheck_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(opt);
    if (sent_train->parsed()) return cmd_sentiment_train(opt);
    if (sent_tag->parsed()) return cmd_sentiment_tag(opt);
    if (train_cmd->parsed()) return cmd_train(opt);
    if (track_cmd->parsed()) return cmd_track(opt);
    if (stats_cmd->parsed()) return cmd_stats(opt);
    if (gradcheck_cmd->parsed()) return cmd_gradcheck(opt, out);
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace dct::cli
