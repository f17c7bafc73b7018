#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "busched/baseline.hpp"
#include "busched/data.hpp"
#include "busched/errors.hpp"
#include "busched/flatten.hpp"
#include "busched/flow.hpp"
#include "busched/metrics.hpp"
#include "busched/model.hpp"
#include "busched/synth.hpp"
#include "busched/week.hpp"
#include "busched/weighted.hpp"

// End-to-end experiment runner: inputs -> matching -> jobs -> solvers ->
// validated schedules -> metrics and CSV files.

namespace busched {

/// A module error annotated with the scenario (or input) it occurred in.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // Horizon.
  std::string week_start = "2023-06-05T14:00:00";
  std::size_t intervals = 672;
  double interval_hours = 0.25;

  // Inputs: a file path, or a synthetic generator when the path is empty.
  std::string timetable_path;
  std::uint64_t timetable_seed = 1;
  TimetableProfile profile;
  std::string emissions_path;
  double emission_mean = 250.0;
  double emission_amplitude = 100.0;
  double emission_peak_hour = 0.0;
  std::string baseload_path;
  OfficeLoad office;

  double charge_rate_kw = 30.0;
  std::optional<double> cap_kw;  // global grid cap, CO2 scenario only

  std::vector<std::string> scenarios{"uncontrolled", "co2", "flatten", "weighted"};
  Weights weights{1.0, 2.0};
  bool sweep = true;
  std::vector<double> sweep_grid = default_flatness_grid();

  // Flexibility experiment.
  double flex_low_kw = 40.0;
  double flex_high_kw = 400.0;
  std::uint64_t flex_seed = 1;

  std::string out_dir = "out";

  Horizon horizon() const {
    const auto start = parse_timestamp(week_start);
    if (!start) throw InvalidInput("week_start is not a timestamp: '" + week_start + "'");
    return Horizon(*start, intervals, interval_hours);
  }
};

struct WeekInputs {
  Horizon horizon;
  LineTimetable timetable;
  WeekPlan plan;
  EmissionSeries emissions;
  BaseloadSeries baseload;  // real (site) baseload
};

inline WeekInputs prepare_inputs(const RunConfig& config) {
  const Horizon horizon = config.horizon();
  auto context = [](const char* what, const std::exception& e) {
    return ScenarioError(std::string(what) + ": " + e.what());
  };
  LineTimetable timetable;
  try {
    timetable = config.timetable_path.empty() ? synth_timetable(config.timetable_seed, config.profile)
                                              : load_timetable(config.timetable_path);
  } catch (const std::exception& e) {
    throw context("timetable", e);
  }
  EmissionSeries emissions;
  try {
    emissions = config.emissions_path.empty()
                    ? sinusoidal_emissions(horizon, config.emission_mean, config.emission_amplitude,
                                           config.emission_peak_hour)
                    : load_emissions(config.emissions_path, horizon);
  } catch (const std::exception& e) {
    throw context("emissions", e);
  }
  BaseloadSeries baseload;
  try {
    baseload = config.baseload_path.empty() ? office_baseload(horizon, config.office)
                                            : load_baseload(config.baseload_path, horizon);
  } catch (const std::exception& e) {
    throw context("baseload", e);
  }
  WeekPlan plan;
  try {
    plan = build_week(timetable, horizon, config.charge_rate_kw);
  } catch (const std::exception& e) {
    throw context("matching", e);
  }
  return {horizon, std::move(timetable), std::move(plan), std::move(emissions), std::move(baseload)};
}

struct ScenarioOutcome {
  std::string label;
  std::vector<double> charging;  // aggregate s, kWh per interval
  ScenarioReport report;
};

struct WeekResult {
  WeekInputs inputs;
  std::vector<ScenarioOutcome> scenarios;
  std::vector<SweepPoint> sweep;

  const ScenarioOutcome* find(const std::string& label) const {
    for (const auto& s : scenarios) {
      if (s.label == label) return &s;
    }
    return nullptr;
  }
};

namespace detail {

inline std::vector<double> validated_profile(const Instance& instance, const Schedule& schedule,
                                             const std::string& label) {
  if (const auto violation = find_violation(instance, schedule)) {
    throw ScenarioError("scenario '" + label + "' produced an invalid schedule: " + *violation);
  }
  return aggregate(schedule);
}

inline std::optional<std::vector<double>> caps_for(const RunConfig& config, const Horizon& horizon) {
  if (!config.cap_kw) return std::nullopt;
  if (!(*config.cap_kw > 0.0)) throw InvalidInput("cap must be positive");
  return std::vector<double>(horizon.size(), *config.cap_kw * horizon.interval_hours());
}

}  // namespace detail

/// Solves one named scenario: uncontrolled, co2, flatten or weighted.
inline ScenarioOutcome run_scenario(const std::string& label, const WeekInputs& inputs,
                                    const RunConfig& config) {
  try {
    const Instance instance(inputs.horizon, inputs.plan.jobs);
    std::vector<double> charging;
    if (label == "uncontrolled") {
      charging = detail::validated_profile(instance, solve_uncontrolled(instance), label);
    } else if (label == "co2") {
      const Instance capped(inputs.horizon, inputs.plan.jobs, detail::caps_for(config, inputs.horizon));
      charging = detail::validated_profile(capped, solve_min_co2(capped, inputs.emissions), label);
    } else if (label == "flatten") {
      charging = detail::validated_profile(
          instance, solve_flatten({instance, inputs.baseload}), label);
    } else if (label == "weighted") {
      charging = detail::validated_profile(
          instance, solve_weighted(instance, inputs.emissions, inputs.baseload, config.weights).schedule,
          label);
    } else {
      throw InvalidInput("unknown scenario '" + label + "'");
    }
    ScenarioReport report = evaluate(label, charging, inputs.baseload, inputs.emissions,
                                     inputs.horizon.interval_hours());
    return {label, std::move(charging), std::move(report)};
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError("scenario '" + label + "': " + e.what());
  }
}

/// One trade-off point per flatness weight (w_c fixed by the config).
inline std::vector<SweepPoint> run_sweep(const WeekInputs& inputs, const RunConfig& config) {
  const Instance instance(inputs.horizon, inputs.plan.jobs);
  std::vector<SweepPoint> points;
  for (double w_f : config.sweep_grid) {
    const std::string label = "sweep w_f=" + detail::format_number(w_f);
    try {
      const Weights weights{config.weights.carbon, w_f};
      const auto result = solve_weighted(instance, inputs.emissions, inputs.baseload, weights);
      const auto charging = detail::validated_profile(instance, result.schedule, label);
      const auto report = evaluate(label, charging, inputs.baseload, inputs.emissions,
                                   inputs.horizon.interval_hours());
      points.push_back({w_f, report.P, report.C, report.F});
    } catch (const ScenarioError&) {
      throw;
    } catch (const std::exception& e) {
      throw ScenarioError(label + ": " + e.what());
    }
  }
  return points;
}

inline WeekResult run_week(const RunConfig& config) {
  WeekResult result{prepare_inputs(config), {}, {}};
  for (const auto& label : config.scenarios) {
    result.scenarios.push_back(run_scenario(label, result.inputs, config));
  }
  if (config.sweep) result.sweep = run_sweep(result.inputs, config);
  return result;
}

inline void write_matching(std::ostream& out, const WeekPlan& plan) {
  out << "date,day,arrivals,next_day_lines,matched\n";
  for (const auto& day : plan.days) {
    out << format_timestamp(Timestamp{day.date}).substr(0, 10) << ',' << kDayTokens[day.weekday]
        << ',' << day.arrivals << ',' << day.next_lines << ',' << day.matched << '\n';
  }
}

/// Writes profiles.csv, report.csv, sweep.csv (when swept) and matching.csv.
inline std::vector<std::string> write_week_outputs(const WeekResult& result,
                                                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  std::vector<std::string> written;
  std::vector<ProfileColumn> columns;
  std::vector<ScenarioReport> reports;
  for (const auto& s : result.scenarios) {
    columns.push_back({s.label, s.charging});
    reports.push_back(s.report);
  }
  const auto& in = result.inputs;
  written.push_back((dir / "profiles.csv").string());
  write_profiles(written.back(), in.horizon, in.baseload, columns, in.emissions);
  written.push_back((dir / "report.csv").string());
  write_report(written.back(), reports);
  if (!result.sweep.empty()) {
    written.push_back((dir / "sweep.csv").string());
    write_sweep(written.back(), result.sweep);
  }
  written.push_back((dir / "matching.csv").string());
  {
    auto out = detail::open_output(written.back());
    write_matching(out, in.plan);
  }
  return written;
}

// ---------------------------------------------------------------------------
// Flexibility experiment

struct FlexibilityResult {
  WeekInputs inputs;
  BaseloadSeries synthetic;  // dummy baseload added to the real one
  BaseloadSeries combined;
  std::vector<double> bus_only;     // flattened against the real baseload
  std::vector<double> coordinated;  // flattened against the combined baseload
  double baseload_peak = 0.0;       // kW, combined baseload alone
  double bus_only_peak = 0.0;       // kW, site peak of the flattening scenario
  double coordinated_peak = 0.0;    // kW, combined baseload plus coordinated charging
  FlexibilityGain gain{};
};

/// Peaks with and without planning the buses around an extra baseload.
/// The bus-only peak is the flattening scenario's site peak P (real baseload
/// included); the gain compares the capacity the buses add on top of the
/// combined baseload peak against it.
inline FlexibilityResult flexibility_experiment(WeekInputs inputs, BaseloadSeries synthetic) {
  FlexibilityResult out{std::move(inputs), std::move(synthetic), {}, {}, {}};
  const auto& in = out.inputs;
  try {
    if (out.synthetic.values.size() != in.horizon.size()) {
      throw InvalidInput("synthetic baseload length does not match the horizon");
    }
    out.combined = in.baseload;
    for (std::size_t i = 0; i < out.combined.values.size(); ++i) {
      out.combined.values[i] += out.synthetic.values[i];
    }
    const Instance instance(in.horizon, in.plan.jobs);
    out.bus_only =
        detail::validated_profile(instance, solve_flatten({instance, in.baseload}), "bus-only");
    out.coordinated =
        detail::validated_profile(instance, solve_flatten({instance, out.combined}), "coordinated");
    const double hours = in.horizon.interval_hours();
    out.baseload_peak = metric_P(out.combined.values, hours);
    out.bus_only_peak = metric_P(levels(out.bus_only, in.baseload.values), hours);
    out.coordinated_peak = metric_P(levels(out.coordinated, out.combined.values), hours);
    out.gain = flexibility_gain(out.baseload_peak, out.bus_only_peak, out.coordinated_peak);
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError(std::string("flexibility: ") + e.what());
  }
  return out;
}

/// The flexibility experiment with a uniform random extra baseload.
inline FlexibilityResult run_flexibility(const RunConfig& config) {
  WeekInputs inputs = prepare_inputs(config);
  BaseloadSeries synthetic;
  try {
    synthetic = random_baseload(inputs.horizon, config.flex_low_kw, config.flex_high_kw,
                                config.flex_seed);
  } catch (const std::exception& e) {
    throw ScenarioError(std::string("flexibility: ") + e.what());
  }
  return flexibility_experiment(std::move(inputs), std::move(synthetic));
}

/// Writes flexibility.csv (peaks and gain) and flexibility_profiles.csv.
inline std::vector<std::string> write_flexibility_outputs(const FlexibilityResult& result,
                                                          const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  std::vector<std::string> written;
  written.push_back((dir / "flexibility.csv").string());
  {
    auto out = detail::open_output(written.back());
    out << "baseload_peak_kw,bus_only_peak_kw,coordinated_peak_kw,additional_kw,gain_pct\n"
        << detail::format_number(result.baseload_peak) << ','
        << detail::format_number(result.bus_only_peak) << ','
        << detail::format_number(result.coordinated_peak) << ','
        << detail::format_number(result.gain.additional_kw) << ','
        << detail::format_number(100.0 * result.gain.gain) << '\n';
  }
  written.push_back((dir / "flexibility_profiles.csv").string());
  const std::vector<ProfileColumn> columns{{"bus_only", result.bus_only},
                                           {"coordinated", result.coordinated}};
  write_profiles(written.back(), result.inputs.horizon, result.combined, columns,
                 result.inputs.emissions);
  return written;
}

}  // namespace busched
