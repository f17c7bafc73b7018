#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "busched/errors.hpp"
#include "busched/flatten.hpp"
#include "busched/flow.hpp"
#include "busched/model.hpp"

// Weighted objective W = w_c * C(s) + w_f * sum_i (s(i) + b(i))^2.
//
// Completing the square per interval turns the linear CO2 term into an
// extra baseload beta(i) = w_c / (2 w_f) * co2(i):
//   W = w_f * sum_i (s(i) + b(i) + beta(i))^2 - w_c * sum_i b(i) co2(i) - w_f * sum_i beta(i)^2
// so the minimiser is a flattening solution against b + beta.

namespace busched {

struct Weights {
  double carbon = 1.0;    // w_c, per kg CO2eq
  double flatness = 1.0;  // w_f, per kWh^2; 0 = pure CO2, +inf = pure flattening

  static Weights pure_co2() { return {1.0, 0.0}; }
  static Weights pure_flatten() { return {1.0, std::numeric_limits<double>::infinity()}; }
  bool is_pure_co2() const noexcept { return flatness == 0.0; }
  bool is_pure_flatten() const noexcept { return std::isinf(flatness); }
};

/// Flatness weights of the default trade-off sweep (w_c = 1).
inline std::vector<double> default_flatness_grid() {
  return {0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0,
          std::numeric_limits<double>::infinity()};
}

/// beta(i) = w_c / (2 w_f) * co2(i).
inline BaseloadSeries emission_baseload(const EmissionSeries& emissions, Weights weights) {
  if (!(weights.carbon > 0.0) || !(weights.flatness > 0.0) || std::isinf(weights.flatness) ||
      std::isinf(weights.carbon)) {
    throw InvalidInput("emission baseload needs finite, strictly positive weights");
  }
  const double factor = weights.carbon / (2.0 * weights.flatness);
  BaseloadSeries out;
  out.values.reserve(emissions.factors.size());
  for (double c : emissions.factors) out.values.push_back(factor * c);
  return out;
}

/// W evaluated directly from its definition.
inline double weighted_objective(std::span<const double> s, const EmissionSeries& emissions,
                                 const BaseloadSeries& baseload, Weights weights) {
  double carbon = 0.0;
  double flat = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    carbon += s[i] * emissions.factors[i];
    const double level = s[i] + baseload.values[i];
    flat += level * level;
  }
  if (weights.is_pure_co2()) return weights.carbon * carbon;
  if (weights.is_pure_flatten()) return std::numeric_limits<double>::infinity();
  return weights.carbon * carbon + weights.flatness * flat;
}

/// W evaluated through the completed square; equals weighted_objective().
inline double completed_square_objective(std::span<const double> s,
                                         const EmissionSeries& emissions,
                                         const BaseloadSeries& baseload, Weights weights) {
  const BaseloadSeries beta = emission_baseload(emissions, weights);
  double square = 0.0;
  double constant = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double shifted = s[i] + baseload.values[i] + beta.values[i];
    square += shifted * shifted;
    constant += weights.carbon * baseload.values[i] * emissions.factors[i] +
                weights.flatness * beta.values[i] * beta.values[i];
  }
  return weights.flatness * square - constant;
}

struct WeightedResult {
  Schedule schedule;
  double objective;  // W(s); +inf for the pure-flattening endpoint
};

/// Minimises W. The endpoints w_f = 0 and w_f = inf go to the CO2 and
/// flattening solvers respectively.
inline WeightedResult solve_weighted(const Instance& instance, const EmissionSeries& emissions,
                                     const BaseloadSeries& real_baseload, Weights weights) {
  if (emissions.factors.size() != instance.interval_count() ||
      real_baseload.values.size() != instance.interval_count()) {
    throw InvalidInput("emission and baseload series must match the horizon");
  }
  if (!(weights.carbon > 0.0) || !(weights.flatness >= 0.0)) {
    throw InvalidInput("weights must be positive");
  }
  if (weights.is_pure_co2()) {
    Schedule schedule = solve_min_co2(instance, emissions);
    const auto s = aggregate(schedule);
    const double objective = weighted_objective(s, emissions, real_baseload, weights);
    return {std::move(schedule), objective};
  }
  if (weights.is_pure_flatten()) {
    return {solve_flatten({instance, real_baseload}), std::numeric_limits<double>::infinity()};
  }

  BaseloadSeries combined = emission_baseload(emissions, weights);
  for (std::size_t i = 0; i < combined.values.size(); ++i) {
    combined.values[i] += real_baseload.values[i];
  }
  Schedule schedule = solve_flatten({instance, combined});
  const auto s = aggregate(schedule);
  const double objective = completed_square_objective(s, emissions, real_baseload, weights);
  return {std::move(schedule), objective};
}

}  // namespace busched
