#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "busched/errors.hpp"
#include "busched/scenario.hpp"

// JSON run configuration. Every key is optional; unknown keys are rejected.
//
// {
//   "horizon":   {"start": "2023-06-05T14:00:00", "intervals": 672, "interval_hours": 0.25},
//   "timetable": {"path": "", "seed": 1, "profile": {...TimetableProfile fields...}},
//   "emissions": {"path": "", "mean": 250, "amplitude": 100, "peak_hour": 0},
//   "baseload":  {"path": "", "office": {"night_kw": 15, "day_kw": 45, "opens_hour": 7, "closes_hour": 18}},
//   "charge_rate_kw": 30,
//   "cap_kw": null,
//   "scenarios": ["uncontrolled", "co2", "flatten", "weighted"],
//   "weights": {"w_c": 1, "w_f": 2},
//   "sweep": {"enabled": true, "w_f": [0, 0.1, ..., "inf"]},
//   "flexibility": {"low_kw": 40, "high_kw": 400, "seed": 1},
//   "out_dir": "out"
// }

namespace busched {

namespace detail {

using json = nlohmann::json;

inline void check_keys(const json& object, std::string_view where,
                       std::initializer_list<std::string_view> allowed) {
  if (!object.is_object()) throw InvalidInput(std::string(where) + " must be a JSON object");
  for (const auto& item : object.items()) {
    bool known = false;
    for (auto key : allowed) known = known || item.key() == key;
    if (!known) throw InvalidInput("unknown key '" + item.key() + "' in " + std::string(where));
  }
}

inline double json_number(const json& value, std::string_view what) {
  if (value.is_string() && (value == "inf" || value == "+inf")) {
    return std::numeric_limits<double>::infinity();
  }
  if (!value.is_number()) throw InvalidInput(std::string(what) + " must be a number");
  return value.get<double>();
}

template <typename T>
void read_number(const json& object, const char* key, T& out, std::string_view where) {
  if (!object.contains(key)) return;
  const auto& value = object.at(key);
  const std::string what = std::string(where) + "." + key;
  if constexpr (std::is_integral_v<T>) {
    if (!value.is_number_unsigned()) {
      throw InvalidInput(what + " must be a non-negative integer");
    }
    out = value.get<T>();
  } else {
    out = static_cast<T>(json_number(value, what));
  }
}

inline void read_string(const json& object, const char* key, std::string& out,
                        std::string_view where) {
  if (!object.contains(key)) return;
  if (!object.at(key).is_string()) {
    throw InvalidInput(std::string(where) + "." + key + " must be a string");
  }
  out = object.at(key).get<std::string>();
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& root) {
  using detail::check_keys;
  using detail::read_number;
  using detail::read_string;
  RunConfig config;
  check_keys(root, "config",
             {"horizon", "timetable", "emissions", "baseload", "charge_rate_kw", "cap_kw",
              "scenarios", "weights", "sweep", "flexibility", "out_dir"});
  if (root.contains("horizon")) {
    const auto& h = root.at("horizon");
    check_keys(h, "horizon", {"start", "intervals", "interval_hours"});
    read_string(h, "start", config.week_start, "horizon");
    read_number(h, "intervals", config.intervals, "horizon");
    read_number(h, "interval_hours", config.interval_hours, "horizon");
  }
  if (root.contains("timetable")) {
    const auto& t = root.at("timetable");
    check_keys(t, "timetable", {"path", "seed", "profile"});
    read_string(t, "path", config.timetable_path, "timetable");
    read_number(t, "seed", config.timetable_seed, "timetable");
    if (t.contains("profile")) {
      const auto& p = t.at("profile");
      auto& out = config.profile;
      check_keys(p, "timetable.profile",
                 {"lines_per_day", "weekdays_identical", "large_fraction", "start_earliest",
                  "start_latest", "end_earliest", "end_mode", "end_latest", "soc_low", "soc_high"});
      if (p.contains("lines_per_day")) {
        const auto& counts = p.at("lines_per_day");
        if (!counts.is_array() || counts.size() != 7) {
          throw InvalidInput("timetable.profile.lines_per_day must list 7 counts");
        }
        for (std::size_t d = 0; d < 7; ++d) {
          if (!counts[d].is_number_unsigned()) {
            throw InvalidInput("timetable.profile.lines_per_day must hold non-negative integers");
          }
          out.lines_per_day[d] = counts[d].get<std::size_t>();
        }
      }
      if (p.contains("weekdays_identical")) {
        if (!p.at("weekdays_identical").is_boolean()) {
          throw InvalidInput("timetable.profile.weekdays_identical must be a boolean");
        }
        out.weekdays_identical = p.at("weekdays_identical").get<bool>();
      }
      read_number(p, "large_fraction", out.large_fraction, "timetable.profile");
      read_number(p, "start_earliest", out.start_earliest, "timetable.profile");
      read_number(p, "start_latest", out.start_latest, "timetable.profile");
      read_number(p, "end_earliest", out.end_earliest, "timetable.profile");
      read_number(p, "end_mode", out.end_mode, "timetable.profile");
      read_number(p, "end_latest", out.end_latest, "timetable.profile");
      read_number(p, "soc_low", out.soc_low, "timetable.profile");
      read_number(p, "soc_high", out.soc_high, "timetable.profile");
    }
  }
  if (root.contains("emissions")) {
    const auto& e = root.at("emissions");
    check_keys(e, "emissions", {"path", "mean", "amplitude", "peak_hour"});
    read_string(e, "path", config.emissions_path, "emissions");
    read_number(e, "mean", config.emission_mean, "emissions");
    read_number(e, "amplitude", config.emission_amplitude, "emissions");
    read_number(e, "peak_hour", config.emission_peak_hour, "emissions");
  }
  if (root.contains("baseload")) {
    const auto& b = root.at("baseload");
    check_keys(b, "baseload", {"path", "office"});
    read_string(b, "path", config.baseload_path, "baseload");
    if (b.contains("office")) {
      const auto& o = b.at("office");
      check_keys(o, "baseload.office", {"night_kw", "day_kw", "opens_hour", "closes_hour"});
      read_number(o, "night_kw", config.office.night_kw, "baseload.office");
      read_number(o, "day_kw", config.office.day_kw, "baseload.office");
      read_number(o, "opens_hour", config.office.opens_hour, "baseload.office");
      read_number(o, "closes_hour", config.office.closes_hour, "baseload.office");
    }
  }
  read_number(root, "charge_rate_kw", config.charge_rate_kw, "config");
  config.profile.charge_rate_kw = config.charge_rate_kw;
  if (root.contains("cap_kw") && !root.at("cap_kw").is_null()) {
    config.cap_kw = detail::json_number(root.at("cap_kw"), "cap_kw");
  }
  if (root.contains("scenarios")) {
    const auto& list = root.at("scenarios");
    if (!list.is_array()) throw InvalidInput("scenarios must be an array of names");
    config.scenarios.clear();
    for (const auto& name : list) {
      if (!name.is_string()) throw InvalidInput("scenarios must be an array of names");
      config.scenarios.push_back(name.get<std::string>());
    }
  }
  if (root.contains("weights")) {
    const auto& w = root.at("weights");
    check_keys(w, "weights", {"w_c", "w_f"});
    read_number(w, "w_c", config.weights.carbon, "weights");
    read_number(w, "w_f", config.weights.flatness, "weights");
  }
  if (root.contains("sweep")) {
    const auto& s = root.at("sweep");
    check_keys(s, "sweep", {"enabled", "w_f"});
    if (s.contains("enabled")) {
      if (!s.at("enabled").is_boolean()) throw InvalidInput("sweep.enabled must be a boolean");
      config.sweep = s.at("enabled").get<bool>();
    }
    if (s.contains("w_f")) {
      const auto& grid = s.at("w_f");
      if (!grid.is_array()) throw InvalidInput("sweep.w_f must be an array");
      config.sweep_grid.clear();
      for (const auto& v : grid) config.sweep_grid.push_back(detail::json_number(v, "sweep.w_f"));
    }
  }
  if (root.contains("flexibility")) {
    const auto& f = root.at("flexibility");
    check_keys(f, "flexibility", {"low_kw", "high_kw", "seed"});
    read_number(f, "low_kw", config.flex_low_kw, "flexibility");
    read_number(f, "high_kw", config.flex_high_kw, "flexibility");
    read_number(f, "seed", config.flex_seed, "flexibility");
  }
  read_string(root, "out_dir", config.out_dir, "config");
  return config;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path + "'");
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(root);
}

}  // namespace busched
