// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dct/nn/network.hpp"

namespace dct::nn {

/// A block of parameters perturbed in place, paired with its analytic
/// gradient.
struct ParameterGroup {
  std::string name;
  std::span<double> values;
  std::span<const double> analytic;
};

struct GradCheckOptions {
  double epsilon = 1e-5;
  std::uint64_t seed = 0;
  /// Total coordinate budget, split evenly across groups.
  std::size_t max_coordinates = 200;
};

struct GroupError {
  std::string name;
  std::size_t checked = 0;
  double max_relative_error = 0.0;
};

struct GradCheckReport {
  std::vector<GroupError> groups;
  double max_relative_error = 0.0;
};

/// |a - n| / max(1e-8, |a| + |n|)
double relative_error(double analytic, double numeric);

/// Compares analytic gradients with central differences
/// (f(x + eps) - f(x - eps)) / 2 eps on a seeded sample of coordinates.
/// `loss` must read the current parameter values; every perturbed value is
/// restored before returning.
GradCheckReport gradcheck(const std::function<double()> &loss,
                          std::span<const ParameterGroup> groups,
                          const GradCheckOptions &options = {});

/// A randomly initialised network on random inputs, used to check
/// backward() against finite differences of sequence_loss().
struct NetworkGradCheckSetup {
  NetworkSizes sizes{6, 4, 3, 8};
  std::size_t days = 4;
  double aux_weight = 0.5;
  double epsilon = 1e-5;
  std::uint64_t seed = 0;
  std::size_t max_coordinates = 200;
};

GradCheckReport check_network_gradients(const NetworkGradCheckSetup &setup);

}  // namespace dct::nn
