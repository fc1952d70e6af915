// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dct/cli.hpp"
#include "dct/datagen.hpp"
#include "dct/error.hpp"
#include "dct/io.hpp"
#include "dct/nn/gradcheck.hpp"
#include "dct/nn/layers.hpp"
#include "dct/tracker.hpp"

PYBIND11_MAKE_OPAQUE(std::vector<dct::Campaign>)

namespace py = pybind11;
using namespace dct;

namespace {

using Matrix = std::vector<std::vector<double>>;
using GateTuple = std::tuple<Matrix, Matrix, std::vector<double>>;

nn::Tensor matrix_tensor(const Matrix &m) {
  if (m.empty()) throw Error("empty matrix");
  std::vector<double> data;
  for (const auto &row : m) {
    if (row.size() != m[0].size()) throw Error("ragged matrix");
    data.insert(data.end(), row.begin(), row.end());
  }
  return nn::Tensor({m.size(), m[0].size()}, std::move(data));
}

nn::GateParameters gate(const GateTuple &g) {
  const auto &bias = std::get<2>(g);
  return {matrix_tensor(std::get<0>(g)), matrix_tensor(std::get<1>(g)),
          nn::Tensor({bias.size()}, bias)};
}

const Campaign &find(const std::vector<Campaign> &campaigns, const std::string &id) {
  for (const auto &c : campaigns)
    if (c.id == id) return c;
  throw py::key_error("unknown campaign id '" + id + "'");
}

template <class T>
void set_from_kwargs(T &target, const py::kwargs &kwargs) {
  py::object obj = py::cast(&target, py::return_value_policy::reference);
  for (const auto &[key, value] : kwargs) {
    const auto name = py::str(key).cast<std::string>();
    if (!py::hasattr(obj, name.c_str())) throw py::type_error("unknown option '" + name + "'");
    obj.attr(name.c_str()) = value;
  }
}

}  // namespace

PYBIND11_MODULE(_dct, m) {
  m.doc() = "Dynamic and cooperative campaign success tracking";
  m.attr("__version__") = "0.1.0";
  py::register_exception<Error>(m, "DctError", PyExc_ValueError);

  // sentiment
  m.def("tokenize", &tokenize, py::arg("text"));

  py::class_<SentimentModel>(m, "SentimentModel")
      .def("classify", &SentimentModel::classify, py::arg("text"))
      .def_property_readonly("vocabulary", &SentimentModel::vocabulary)
      .def_property_readonly("weights", &SentimentModel::weights)
      .def_property_readonly("bias", &SentimentModel::bias)
      .def("to_json", &io::sentiment_model_to_json)
      .def_static("from_json", &io::sentiment_model_from_json, py::arg("text"));

  m.def(
      "train_sentiment",
      [](const std::vector<std::pair<std::string, bool>> &docs, std::size_t epochs,
         double learning_rate, std::uint64_t seed) {
        std::vector<LabeledDocument> corpus;
        for (const auto &[text, positive] : docs)
          corpus.push_back({text, positive ? Polarity::positive : Polarity::negative});
        return train_sentiment(corpus, epochs, learning_rate, seed);
      },
      py::arg("corpus"), py::arg("epochs") = 50, py::arg("learning_rate") = 0.5,
      py::arg("seed") = 0, "Train on (text, is_positive) pairs.");

  // features
  m.def("funds_bucket", &funds_bucket, py::arg("amount"), py::arg("bucket_count") = 12);
  m.def("bucket_funds", &bucket_funds, py::arg("amount"), py::arg("bucket_count") = 12);

  // nn
  m.def(
      "lstm_step",
      [](const std::vector<double> &x, const std::vector<double> &h, const std::vector<double> &c,
         const GateTuple &input_gate, const GateTuple &forget_gate, const GateTuple &candidate,
         const GateTuple &output_gate) {
        const nn::LstmParameters p{gate(input_gate), gate(forget_gate), gate(candidate),
                                   gate(output_gate)};
        const auto s = nn::lstm_step(x, {h, c}, p);
        return std::make_pair(s.hidden, s.cell);
      },
      py::arg("x"), py::arg("h"), py::arg("c"), py::arg("input_gate"), py::arg("forget_gate"),
      py::arg("candidate"), py::arg("output_gate"),
      "One LSTM update. Each gate is (W, U, b). Returns (h, c).");
  m.def(
      "attention_weights",
      [](const Matrix &rows, const std::vector<double> &w, double b) {
        return nn::attention_weights(rows, {nn::Tensor({w.size()}, w), nn::Tensor({1}, {b})});
      },
      py::arg("rows"), py::arg("weights"), py::arg("bias"));
  m.def(
      "attention_pool",
      [](const std::vector<double> &alpha, const Matrix &rows) {
        return nn::attention_pool(alpha, rows);
      },
      py::arg("alpha"), py::arg("rows"));
  m.def("softmax_binary", &nn::softmax_binary, py::arg("logits"));
  m.def("cross_entropy", &nn::cross_entropy, py::arg("p"), py::arg("label"));
  m.def(
      "gradcheck",
      [](std::uint64_t seed) {
        nn::NetworkGradCheckSetup setup;
        setup.seed = seed;
        const auto report = nn::check_network_gradients(setup);
        py::dict out;
        for (const auto &g : report.groups) out[py::str(g.name)] = g.max_relative_error;
        return out;
      },
      py::arg("seed") = 0, "Maximum relative gradient error per parameter tensor.");

  // datasets
  py::class_<GenConfig>(m, "GenConfig")
      .def(py::init([](const py::kwargs &kwargs) {
        GenConfig c;
        set_from_kwargs(c, kwargs);
        return c;
      }))
      .def_readwrite("n_campaigns", &GenConfig::n_campaigns)
      .def_readwrite("duration_min", &GenConfig::duration_min)
      .def_readwrite("duration_max", &GenConfig::duration_max)
      .def_readwrite("base_success_rate", &GenConfig::base_success_rate)
      .def_readwrite("sentiment_signal", &GenConfig::sentiment_signal)
      .def_readwrite("funds_signal", &GenConfig::funds_signal)
      .def_readwrite("reviews_per_day", &GenConfig::reviews_per_day)
      .def_readwrite("corpus_size", &GenConfig::corpus_size)
      .def_readwrite("seed", &GenConfig::seed);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init([](const py::kwargs &kwargs) {
        TrainConfig c;
        set_from_kwargs(c, kwargs);
        return c;
      }))
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("aux_weight", &TrainConfig::aux_weight)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("clip_norm", &TrainConfig::clip_norm)
      .def_readwrite("static_dim", &TrainConfig::static_dim)
      .def_readwrite("hidden_dim", &TrainConfig::hidden_dim)
      .def_readwrite("zero_heads", &TrainConfig::zero_heads)
      .def_readwrite("bucket_count", &TrainConfig::bucket_count);

  py::class_<std::vector<Campaign>>(m, "Dataset")
      .def("__len__", [](const std::vector<Campaign> &d) { return d.size(); })
      .def_property_readonly("ids",
                             [](const std::vector<Campaign> &d) {
                               std::vector<std::string> ids;
                               for (const auto &c : d) ids.push_back(c.id);
                               return ids;
                             })
      .def("outcomes",
           [](const std::vector<Campaign> &d) {
             std::vector<std::optional<int>> out;
             for (const auto &c : d)
               out.push_back(c.outcome ? std::optional<int>(static_cast<int>(*c.outcome))
                                       : std::nullopt);
             return out;
           })
      .def("slice",
           [](const std::vector<Campaign> &d, std::size_t start, std::size_t stop) {
             stop = std::min(stop, d.size());
             if (start > stop) throw py::index_error("bad slice");
             return std::vector<Campaign>(d.begin() + start, d.begin() + stop);
           })
      .def("tag", [](std::vector<Campaign> &d,
                     const SentimentModel &model) { return tag_reviews(d, model); })
      .def("daily_stats",
           [](const std::vector<Campaign> &d, const std::string &id) {
             std::vector<std::tuple<int, std::size_t, std::size_t>> out;
             for (const auto &rec : find(d, id).days) {
               const auto s = aggregate_day(rec);
               out.emplace_back(s.day, s.n_pos, s.n_neg);
             }
             return out;
           },
           py::arg("campaign_id"), "(day, n_pos, n_neg) per day.")
      .def("to_jsonl", [](const std::vector<Campaign> &d) { return io::campaigns_to_jsonl(d); })
      .def_static("from_jsonl", &io::campaigns_from_jsonl, py::arg("text"));

  m.def(
      "generate",
      [](const GenConfig &config) {
        auto data = generate(config);
        std::vector<std::pair<std::string, bool>> corpus;
        for (const auto &doc : data.corpus)
          corpus.emplace_back(doc.text, doc.label == Polarity::positive);
        return std::make_pair(std::move(data.campaigns), std::move(corpus));
      },
      py::arg("config"), "Returns (dataset, [(text, is_positive), ...]).");

  // tracking
  py::class_<DctParameters>(m, "Model")
      .def_property_readonly("variant",
                             [](const DctParameters &p) { return std::string(to_string(p.variant)); })
      .def_property_readonly("parameter_count",
                             [](const DctParameters &p) { return p.network.parameter_count(); })
      .def("to_json", &io::checkpoint_to_json)
      .def_static("from_json", &io::checkpoint_from_json, py::arg("text"));

  m.def(
      "train",
      [](const std::vector<Campaign> &dataset, const std::string &variant,
         const TrainConfig &config) {
        const auto schema = fit_schema(dataset, config.bucket_count);
        auto result = train(dataset, schema, config, variant_from_string(variant));
        return std::make_pair(std::move(result.params), std::move(result.loss_history));
      },
      py::arg("dataset"), py::arg("variant") = "full", py::arg("config") = TrainConfig{},
      "Returns (model, per-epoch loss).");

  m.def(
      "predict",
      [](const std::vector<Campaign> &dataset, const std::string &id, const DctParameters &model,
         std::optional<std::size_t> days) {
        const auto &c = find(dataset, id);
        return forward(c, days.value_or(c.days.size()), model).p_success;
      },
      py::arg("dataset"), py::arg("campaign_id"), py::arg("model"), py::arg("days") = py::none());

  m.def(
      "track",
      [](const std::vector<Campaign> &dataset, const std::string &id, const DctParameters &full,
         const DctParameters &funds_only) {
        const auto curve = track(find(dataset, id), full, funds_only);
        py::list rows;
        for (const auto &p : curve.points) {
          py::dict row;
          row["day"] = p.day;
          row["p_success_full"] = p.p_success_full;
          row["p_success_funds_only"] = p.p_success_funds_only;
          row["emotion"] = to_string(p.emotion);
          row["emotion_prob"] = p.emotion_prob;
          rows.append(row);
        }
        return rows;
      },
      py::arg("dataset"), py::arg("campaign_id"), py::arg("full"), py::arg("funds_only"));

  m.def(
      "evaluate",
      [](const std::vector<Campaign> &dataset, const DctParameters &model) {
        const auto metrics = evaluate(dataset, model);
        py::dict out;
        out["count"] = metrics.count;
        out["accuracy"] = metrics.accuracy;
        out["auc"] = metrics.auc ? py::cast(*metrics.auc) : py::none();
        out["mean_cross_entropy"] = metrics.mean_cross_entropy;
        return out;
      },
      py::arg("dataset"), py::arg("model"));

  m.def("roc_auc", &roc_auc, py::arg("scores"), py::arg("labels"));

  m.def(
      "run_cli",
      [](const std::vector<std::string> &args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return std::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one dct command in-process. Returns (exit_code, stdout, stderr).");
}
