// SPDX-License-Identifier: Apache-2.0
#include "dct/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dct/error.hpp"

namespace dct::nn {

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

GradCheckReport gradcheck(const std::function<double()> &loss,
                          std::span<const ParameterGroup> groups,
                          const GradCheckOptions &options) {
  if (!(options.epsilon > 0.0)) throw Error("gradcheck: epsilon must be positive");
  if (groups.empty()) throw Error("gradcheck: no parameter groups");

  auto evaluate = [&loss] {
    const double value = loss();
    if (!std::isfinite(value)) throw Error("gradcheck: non-finite loss");
    return value;
  };
  evaluate();

  const std::size_t per_group = std::max<std::size_t>(1, options.max_coordinates / groups.size());
  std::mt19937_64 rng(options.seed);
  GradCheckReport report;

  for (const auto &group : groups) {
    if (group.values.size() != group.analytic.size())
      throw Error("gradcheck: group '" + group.name + "' has mismatched gradient size");
    std::vector<std::size_t> coords(group.values.size());
    std::iota(coords.begin(), coords.end(), 0);
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(std::min(per_group, coords.size()));

    GroupError result{group.name, coords.size(), 0.0};
    for (std::size_t k : coords) {
      const double original = group.values[k];
      group.values[k] = original + options.epsilon;
      const double plus = evaluate();
      group.values[k] = original - options.epsilon;
      const double minus = evaluate();
      group.values[k] = original;
      const double numeric = (plus - minus) / (2.0 * options.epsilon);
      result.max_relative_error =
          std::max(result.max_relative_error, relative_error(group.analytic[k], numeric));
    }
    report.max_relative_error = std::max(report.max_relative_error, result.max_relative_error);
    report.groups.push_back(std::move(result));
  }
  return report;
}

GradCheckReport check_network_gradients(const NetworkGradCheckSetup &setup) {
  if (setup.days == 0) throw Error("gradcheck: need at least one day");
  NetworkParameters params = initialize_network(setup.sizes, setup.seed);
  std::mt19937_64 rng(setup.seed + 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Move biases off zero so no gate sits at a symmetric point.
  for (auto &[name, tensor] : params.named())
    if (name.ends_with(".bias"))
      for (double &v : tensor->values()) v += unit(rng) - 0.5;

  Vector static_input(setup.sizes.static_input);
  for (double &v : static_input) v = unit(rng);
  std::vector<Vector> daily(setup.days, Vector(setup.sizes.daily_input));
  for (auto &row : daily)
    for (double &v : row) v = unit(rng);

  LossTargets targets;
  targets.success_label = 1;
  targets.aux_weight = setup.aux_weight;
  // Cycle negative, positive, unlabelled so both emotion classes and the
  // exclusion path are always exercised.
  for (std::size_t t = 0; t < setup.days; ++t)
    targets.emotion_labels.push_back(t % 3 == 2 ? std::nullopt
                                                : std::optional<std::size_t>(t % 3));

  const auto record = forward_record(static_input, daily, params);
  const auto loss = sequence_loss(record, targets);
  const GradientBundle grads = backward(record, params, loss.upstream);

  std::vector<ParameterGroup> groups;
  auto values = params.named();
  const auto analytic = grads.named();
  for (std::size_t i = 0; i < values.size(); ++i)
    groups.push_back({values[i].name, values[i].tensor->values(), analytic[i].tensor->values()});

  auto evaluate = [&] {
    return sequence_loss(forward_record(static_input, daily, params), targets).loss;
  };
  return gradcheck(evaluate, groups, {setup.epsilon, setup.seed, setup.max_coordinates});
}

}  // namespace dct::nn
