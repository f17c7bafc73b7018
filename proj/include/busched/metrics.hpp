#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "busched/errors.hpp"
#include "busched/model.hpp"

namespace busched {

/// F(s) = sum_i s(i)^2, in kWh^2.
inline double metric_F(std::span<const double> s) {
  double total = 0.0;
  for (double v : s) total += v * v;
  return total;
}

/// C(s) = sum_i s(i) co2(i), in kg CO2eq.
inline double metric_C(std::span<const double> s, const EmissionSeries& emissions) {
  if (s.size() != emissions.factors.size()) {
    throw InvalidInput("profile and emission series lengths differ");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) total += s[i] * emissions.factors[i];
  return total;
}

/// P(s) = max_i s(i) / |M_i|, in kW.
inline double metric_P(std::span<const double> s, double interval_hours) {
  if (!(interval_hours > 0.0)) throw InvalidInput("interval length must be positive");
  double peak = 0.0;
  for (double v : s) peak = std::max(peak, v);
  return peak / interval_hours;
}

struct ScenarioReport {
  std::string label;
  double F = 0.0;  // kWh^2
  double C = 0.0;  // kg CO2eq
  double P = 0.0;  // kW

  // Percentage reductions against a reference scenario (positive = lower).
  struct Reduction {
    double F = 0.0;
    double C = 0.0;
    double P = 0.0;
  };
  Reduction reduction_against(const ScenarioReport& reference) const {
    auto pct = [](double value, double ref) { return ref > 0.0 ? 100.0 * (1.0 - value / ref) : 0.0; };
    return {pct(F, reference.F), pct(C, reference.C), pct(P, reference.P)};
  }
};

/// Metrics of one scenario. F and P are taken over the site profile
/// (charging plus baseload); C over the charging energy only.
inline ScenarioReport evaluate(std::string label, std::span<const double> charging,
                               const BaseloadSeries& baseload, const EmissionSeries& emissions,
                               double interval_hours) {
  if (charging.size() != baseload.values.size()) {
    throw InvalidInput("profile and baseload lengths differ");
  }
  std::vector<double> site(charging.begin(), charging.end());
  for (std::size_t i = 0; i < site.size(); ++i) site[i] += baseload.values[i];
  return {std::move(label), metric_F(site), metric_C(charging, emissions),
          metric_P(site, interval_hours)};
}

struct FlexibilityGain {
  double additional_kw;  // coordinated peak above the baseload peak
  double gain;           // fraction in [0, 1] of the independent bus peak saved
};

/// Peak capacity saved by planning the buses around a baseload rather than
/// independently of it.
inline FlexibilityGain flexibility_gain(double baseload_peak, double bus_only_flat_peak,
                                        double coordinated_peak) {
  if (!(baseload_peak > 0.0) || !(bus_only_flat_peak > 0.0) || !(coordinated_peak > 0.0)) {
    throw InvalidInput("flexibility peaks must be positive");
  }
  if (coordinated_peak < baseload_peak) {
    throw InvalidInput("coordinated peak cannot fall below the baseload peak");
  }
  const double additional = coordinated_peak - baseload_peak;
  return {additional, 1.0 - additional / bus_only_flat_peak};
}

}  // namespace busched
