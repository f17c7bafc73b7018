#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "busched/data.hpp"
#include "busched/errors.hpp"
#include "busched/feasibility.hpp"
#include "busched/matching.hpp"
#include "busched/model.hpp"
#include "busched/week.hpp"

// Seeded synthetic inputs: uniform random baseloads, an office-shaped site
// load, a day-night emission curve and weekly timetables whose arrivals
// cluster in the evening. Every generator is a pure function of its
// arguments; doubles are drawn from the raw 64-bit engine output so that
// results do not depend on the standard library's distributions.

namespace busched {

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double low, double high) { return low + (high - low) * uniform(); }

  /// Triangular on [low, high] with the given mode.
  double triangular(double low, double mode, double high) {
    const double u = uniform();
    const double span = high - low;
    if (span <= 0.0) return low;
    const double split = (mode - low) / span;
    if (u < split) return low + std::sqrt(u * span * (mode - low));
    return high - std::sqrt((1.0 - u) * span * (high - mode));
  }

 private:
  std::mt19937_64 engine_;
};

/// I.i.d. uniform power in [low_kw, high_kw] per interval, as kWh/interval.
inline BaseloadSeries random_baseload(const Horizon& horizon, double low_kw, double high_kw,
                                      std::uint64_t seed) {
  if (!(low_kw >= 0.0) || !(low_kw < high_kw) || !std::isfinite(high_kw)) {
    throw InvalidInput("random baseload needs 0 <= low < high");
  }
  SeededRng rng(seed);
  BaseloadSeries out;
  out.values.reserve(horizon.size());
  for (std::size_t i = 0; i < horizon.size(); ++i) {
    out.values.push_back(rng.uniform(low_kw, high_kw) * horizon.interval_hours());
  }
  return out;
}

/// Office-building load: `day_kw` on weekdays between the given hours,
/// `night_kw` otherwise.
struct OfficeLoad {
  double night_kw = 15.0;
  double day_kw = 45.0;
  double opens_hour = 7.0;
  double closes_hour = 18.0;
};

inline BaseloadSeries office_baseload(const Horizon& horizon, const OfficeLoad& load = {}) {
  if (!(load.night_kw >= 0.0) || !(load.day_kw >= 0.0)) {
    throw InvalidInput("office load must be non-negative");
  }
  BaseloadSeries out;
  out.values.reserve(horizon.size());
  for (std::size_t i = 0; i < horizon.size(); ++i) {
    const Timestamp t = horizon.interval_start(i);
    const double hour = seconds_to_hours(t - floor_to_grid(t, Seconds{86400}));
    const bool open = iso_weekday_index(t) < 5 && hour >= load.opens_hour && hour < load.closes_hour;
    out.values.push_back((open ? load.day_kw : load.night_kw) * horizon.interval_hours());
  }
  return out;
}

/// co2(t) = mean + amplitude * cos(2 pi (hour(t) - peak_hour) / 24), sampled at
/// interval midpoints.
inline EmissionSeries sinusoidal_emissions(const Horizon& horizon, double mean = 250.0,
                                           double amplitude = 100.0, double peak_hour = 0.0) {
  if (!(amplitude >= 0.0) || !(mean - amplitude >= 0.0)) {
    throw InvalidInput("emission curve must stay non-negative");
  }
  EmissionSeries out;
  out.factors.reserve(horizon.size());
  for (std::size_t i = 0; i < horizon.size(); ++i) {
    const Timestamp t = horizon.interval_start(i);
    const double hour =
        seconds_to_hours(t - floor_to_grid(t, Seconds{86400})) + 0.5 * horizon.interval_hours();
    out.factors.push_back(mean + amplitude *
                                     std::cos(2.0 * std::numbers::pi * (hour - peak_hour) / 24.0));
  }
  return out;
}

/// Shape of a synthetic weekly timetable. Hours are offsets from the
/// service day's midnight; ends past 24 fall on the next morning.
struct TimetableProfile {
  std::array<std::size_t, 7> lines_per_day{33, 33, 33, 33, 33, 22, 23};
  bool weekdays_identical = true;   // Monday to Thursday share one roster
  double large_fraction = 0.5;      // share of 273 kWh buses
  double start_earliest = 5.0;      // line starts, uniform
  double start_latest = 13.0;
  double end_earliest = 15.0;       // line ends, triangular
  double end_mode = 22.0;
  double end_latest = 27.0;
  double soc_low = 0.2;             // soc_after as a fraction of capacity, uniform
  double soc_high = 0.7;
  double charge_rate_kw = 30.0;     // used to validate the generated roster
};

namespace detail {

inline Seconds round_to_minute(double hours) {
  return Seconds{static_cast<long>(std::llround(hours * 60.0)) * 60};
}

inline void validate(const TimetableProfile& p) {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(p.large_fraction) || p.large_fraction < 0.0 || p.large_fraction > 1.0) {
    throw GenerationInfeasible("large-bus fraction must lie in [0, 1]");
  }
  if (!finite(p.soc_low) || !finite(p.soc_high) || p.soc_low < 0.0 || p.soc_high > 1.0 ||
      p.soc_low > p.soc_high) {
    throw GenerationInfeasible("state-of-charge range must satisfy 0 <= low <= high <= 1");
  }
  if (!(p.start_earliest >= 0.0) || !(p.start_earliest <= p.start_latest) ||
      !(p.start_latest < p.end_earliest) || !(p.end_earliest <= p.end_mode) ||
      !(p.end_mode <= p.end_latest) || !(p.end_latest <= 47.0)) {
    throw GenerationInfeasible(
        "need 0 <= start_earliest <= start_latest < end_earliest <= end_mode <= end_latest <= 47");
  }
  if (!(p.charge_rate_kw > 0.0)) throw GenerationInfeasible("charge rate must be positive");
}

}  // namespace detail

/// Weekly timetable with the profile's per-day line counts. Line ids are
/// "L01", "L02", ... per day. The roster is checked by building the jobs of
/// the default week; throws GenerationInfeasible if any job is infeasible.
inline LineTimetable synth_timetable(std::uint64_t seed, const TimetableProfile& profile = {}) {
  detail::validate(profile);
  SeededRng rng(seed);
  LineTimetable table;
  std::vector<TimetableEntry> monday;
  for (unsigned day = 0; day < 7; ++day) {
    if (profile.weekdays_identical && day >= 1 && day <= 3 &&
        profile.lines_per_day[day] == profile.lines_per_day[0]) {
      for (TimetableEntry entry : monday) {
        entry.day = day;
        table.entries.push_back(std::move(entry));
      }
      continue;
    }
    for (std::size_t k = 0; k < profile.lines_per_day[day]; ++k) {
      TimetableEntry entry;
      entry.day = day;
      char id[16];
      std::snprintf(id, sizeof id, "L%02zu", k + 1);
      entry.line_id = id;
      entry.bus_type = rng.uniform() < profile.large_fraction ? BusType::Large : BusType::Small;
      entry.start = detail::round_to_minute(rng.uniform(profile.start_earliest, profile.start_latest));
      entry.end = detail::round_to_minute(
          rng.triangular(profile.end_earliest, profile.end_mode, profile.end_latest));
      if (entry.end <= entry.start) entry.end = entry.start + Seconds{60};
      const double capacity = battery_capacity(entry.bus_type);
      const double fraction = rng.uniform(profile.soc_low, profile.soc_high);
      entry.soc_after = std::round(fraction * capacity * 10.0) / 10.0;
      if (day == 0) monday.push_back(entry);
      table.entries.push_back(std::move(entry));
    }
  }

  try {
    const Instance instance(default_week_horizon(),
                            build_week(table, default_week_horizon(), profile.charge_rate_kw).jobs);
    if (!check_feasible(instance)) throw GenerationInfeasible("generated roster is infeasible");
  } catch (const WindowInfeasible& e) {
    throw GenerationInfeasible(std::string("generated roster is infeasible: ") + e.what());
  }
  return table;
}

}  // namespace busched
