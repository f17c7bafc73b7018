#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "busched/errors.hpp"
#include "busched/matching.hpp"
#include "busched/metrics.hpp"
#include "busched/model.hpp"
#include "busched/time.hpp"

// CSV ingestion, resampling and serialisation. All files are headered,
// comma-separated, without quoting; timestamps are naive local ISO-8601.
//
//   emissions   timestamp,co2_kg_per_kwh
//   baseload    timestamp,baseload_kwh          (energy per row step)
//   timetable   day,line_id,start,end,bus_type,soc_after_kwh
//   profiles    timestamp,baseload_kw,<scenario>_kw...,co2_factor
//   report      scenario,F,C,P,F_reduction_pct,C_reduction_pct,P_reduction_pct
//   sweep       w_f,P,C,F

namespace busched {

namespace detail {

inline std::string_view trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  return text;
}

inline std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    const auto piece = line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos);
    fields.emplace_back(trim(piece));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return fields;
}

struct CsvRow {
  std::size_t number;  // 1-based file line
  std::vector<std::string> fields;
};

/// Reads a headered CSV, checking the header against `columns`. Blank lines
/// are skipped.
inline std::vector<CsvRow> read_csv(std::istream& in, std::span<const std::string_view> columns) {
  std::string line;
  std::size_t number = 0;
  std::optional<std::vector<std::string>> header;
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (!header) {
      if (!fields.empty() && fields.front().rfind("\xEF\xBB\xBF", 0) == 0) {
        fields.front().erase(0, 3);
      }
      if (fields.size() != columns.size()) {
        throw SchemaError("expected " + std::to_string(columns.size()) + " header columns, got " +
                              std::to_string(fields.size()),
                          number, fields.empty() ? std::string{} : fields.front());
      }
      for (std::size_t k = 0; k < columns.size(); ++k) {
        if (fields[k] != columns[k]) {
          throw SchemaError("expected header '" + std::string(columns[k]) + "'", number, fields[k]);
        }
      }
      header = std::move(fields);
      continue;
    }
    if (fields.size() != columns.size()) {
      throw ParseError("expected " + std::to_string(columns.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       number);
    }
    rows.push_back({number, std::move(fields)});
  }
  if (!header) throw ParseError("missing header", number == 0 ? 1 : number);
  return rows;
}

inline double parse_number(const std::string& text, std::size_t row, std::string_view column) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last) {
    throw SchemaError("not a number: '" + text + "'", row, std::string(column));
  }
  return value;
}

inline Timestamp parse_time_field(const std::string& text, std::size_t row,
                                  std::string_view column) {
  const auto t = parse_timestamp(text);
  if (!t) throw SchemaError("not a timestamp: '" + text + "'", row, std::string(column));
  return *t;
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[40];
  for (int precision = 6; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

inline std::string format_fixed(double value) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  // Avoid "-0.000000" so that output does not depend on the sign of zero.
  if (std::string_view(buf) == "-0.000000") return "0.000000";
  return buf;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Time series

/// Rows of a timestamped series; timestamps strictly increasing, every gap a
/// multiple of `step` (the smallest gap). Missing rows are allowed in the
/// file and only reported when a horizon needs them.
struct TimeSeriesFile {
  std::vector<Timestamp> times;
  std::vector<double> values;
  Seconds step{0};
};

inline TimeSeriesFile parse_series(std::istream& in, std::string_view value_column,
                                   bool nonnegative) {
  const std::array<std::string_view, 2> columns{"timestamp", value_column};
  const auto rows = detail::read_csv(in, columns);
  TimeSeriesFile file;
  for (const auto& row : rows) {
    const Timestamp t = detail::parse_time_field(row.fields[0], row.number, "timestamp");
    const double v = detail::parse_number(row.fields[1], row.number, value_column);
    if (!std::isfinite(v)) {
      throw SchemaError("value must be finite", row.number, std::string(value_column));
    }
    if (nonnegative && v < 0.0) {
      throw SchemaError("value must be non-negative", row.number, std::string(value_column));
    }
    if (!file.times.empty() && !(t > file.times.back())) {
      throw SchemaError("timestamps must be strictly increasing", row.number, "timestamp");
    }
    file.times.push_back(t);
    file.values.push_back(v);
  }
  if (file.times.empty()) throw ParseError("series has no data rows", 1);
  if (file.times.size() == 1) return file;  // step stays 0
  Seconds step{std::numeric_limits<Seconds::rep>::max()};
  for (std::size_t k = 1; k < file.times.size(); ++k) {
    step = std::min(step, file.times[k] - file.times[k - 1]);
  }
  for (std::size_t k = 1; k < file.times.size(); ++k) {
    if ((file.times[k] - file.times[k - 1]) % step != Seconds{0}) {
      throw SchemaError("step is not uniform", rows[k].number, "timestamp");
    }
  }
  file.step = step;
  return file;
}

enum class Resampling {
  Intensive,  // per-kWh factors: replicate coarse steps, average fine steps
  Energy,     // energy amounts: split coarse steps evenly, sum fine steps
};

/// Resamples onto the horizon grid. The row step must divide the interval
/// length or be a multiple of it.
inline std::vector<double> resample(const TimeSeriesFile& file, const Horizon& horizon,
                                    Resampling mode) {
  const Seconds interval = horizon.interval_length();
  Seconds step = file.step;
  if (step == Seconds{0}) step = interval;  // single row: treat as one interval
  if (interval % step != Seconds{0} && step % interval != Seconds{0}) {
    throw InvalidInput("series step of " + std::to_string(step.count()) +
                       " s is incompatible with the " + std::to_string(interval.count()) +
                       " s interval");
  }
  std::map<Timestamp, double> rows;
  for (std::size_t k = 0; k < file.times.size(); ++k) rows.emplace(file.times[k], file.values[k]);
  const Timestamp anchor = file.times.front();

  auto row_at = [&](Timestamp t) {
    const auto it = rows.find(t);
    if (it == rows.end()) {
      throw CoverageGap("no value for " + format_timestamp(t) + " (horizon " +
                        format_timestamp(horizon.start()) + " to " +
                        format_timestamp(horizon.end()) + ")");
    }
    return it->second;
  };
  // Start of the row period containing t (rows on the grid anchored at the first row).
  auto row_start = [&](Timestamp t) {
    auto offset = (t - anchor).count() % step.count();
    if (offset < 0) offset += step.count();
    return t - Seconds{offset};
  };

  std::vector<double> out(horizon.size());
  for (std::size_t i = 0; i < horizon.size(); ++i) {
    const Timestamp t = horizon.interval_start(i);
    if (step >= interval) {
      const Timestamp r = row_start(t);
      if (r + step < t + interval) {
        throw InvalidInput("series rows are not aligned with the horizon grid");
      }
      const double value = row_at(r);
      const double parts = static_cast<double>(step / interval);
      out[i] = mode == Resampling::Energy ? value / parts : value;
    } else {
      if (row_start(t) != t) throw InvalidInput("series rows are not aligned with the horizon grid");
      const auto parts = interval / step;
      double sum = 0.0;
      for (long k = 0; k < parts; ++k) sum += row_at(t + step * k);
      out[i] = mode == Resampling::Energy ? sum : sum / static_cast<double>(parts);
    }
  }
  return out;
}

inline EmissionSeries parse_emissions(std::istream& in, const Horizon& horizon) {
  return {resample(parse_series(in, "co2_kg_per_kwh", true), horizon, Resampling::Intensive)};
}

/// Emission factors (kg CO2eq/kWh), hourly or finer, onto the horizon.
inline EmissionSeries load_emissions(const std::string& path, const Horizon& horizon) {
  auto in = detail::open_input(path);
  return parse_emissions(in, horizon);
}

inline BaseloadSeries parse_baseload(std::istream& in, const Horizon& horizon) {
  return {resample(parse_series(in, "baseload_kwh", true), horizon, Resampling::Energy)};
}

/// Baseload energy per row step (kWh) onto the horizon; energy is conserved.
inline BaseloadSeries load_baseload(const std::string& path, const Horizon& horizon) {
  auto in = detail::open_input(path);
  return parse_baseload(in, horizon);
}

inline void write_series(std::ostream& out, const Horizon& horizon, std::string_view column,
                         std::span<const double> values) {
  if (values.size() != horizon.size()) {
    throw InvalidInput("series length does not match the horizon");
  }
  out << "timestamp," << column << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << format_timestamp(horizon.interval_start(i)) << ',' << detail::format_number(values[i])
        << '\n';
  }
}

inline void write_emissions(const std::string& path, const Horizon& horizon,
                            const EmissionSeries& emissions) {
  auto out = detail::open_output(path);
  write_series(out, horizon, "co2_kg_per_kwh", emissions.factors);
}

inline void write_baseload(const std::string& path, const Horizon& horizon,
                           const BaseloadSeries& baseload) {
  auto out = detail::open_output(path);
  write_series(out, horizon, "baseload_kwh", baseload.values);
}

// ---------------------------------------------------------------------------
// Timetable

constexpr std::array<std::string_view, 7> kDayTokens{"MON", "TUE", "WED", "THU",
                                                     "FRI", "SAT", "SUN"};

/// One weekly timetable row. Times are offsets from midnight of `day`;
/// an end after midnight is written with hours >= 24 (e.g. 25:30).
struct TimetableEntry {
  unsigned day = 0;  // 0 = Monday
  std::string line_id;
  Seconds start{0};
  Seconds end{0};
  BusType bus_type = BusType::Large;
  double soc_after = 0.0;
};

struct LineTimetable {
  std::vector<TimetableEntry> entries;

  std::array<std::size_t, 7> lines_per_day() const {
    std::array<std::size_t, 7> counts{};
    for (const auto& entry : entries) ++counts[entry.day];
    return counts;
  }

  /// Lines of weekday `day` driven on `date`, in file order.
  std::vector<LineRecord> lines_on(unsigned day, std::chrono::sys_days date) const {
    std::vector<LineRecord> out;
    const Timestamp midnight{date};
    for (const auto& entry : entries) {
      if (entry.day != day) continue;
      out.push_back({entry.line_id, midnight + entry.start, midnight + entry.end, entry.bus_type,
                     entry.soc_after});
    }
    return out;
  }

  /// True when Monday to Thursday carry the same rows.
  bool weekdays_identical() const {
    auto key = [&](unsigned day) {
      std::vector<std::tuple<std::string, long, long, int, double>> rows;
      for (const auto& e : entries) {
        if (e.day == day) {
          rows.emplace_back(e.line_id, e.start.count(), e.end.count(),
                            static_cast<int>(e.bus_type), e.soc_after);
        }
      }
      std::sort(rows.begin(), rows.end());
      return rows;
    };
    const auto monday = key(0);
    return key(1) == monday && key(2) == monday && key(3) == monday;
  }
};

namespace detail {

/// "HH:MM" with 0 <= HH <= 47.
inline std::optional<Seconds> parse_clock(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == text.npos || colon == 0 || colon > 2 || text.size() != colon + 3) return std::nullopt;
  int hour = 0, minute = 0;
  if (!parse_digits(text, 0, colon, hour) || !parse_digits(text, colon + 1, 2, minute)) {
    return std::nullopt;
  }
  if (hour > 47 || minute > 59) return std::nullopt;
  return Seconds{hour * 3600 + minute * 60};
}

inline std::string format_clock(Seconds offset) {
  char buf[32];
  const auto minutes = offset.count() / 60;
  std::snprintf(buf, sizeof buf, "%02ld:%02ld", static_cast<long>(minutes / 60),
                static_cast<long>(minutes % 60));
  return buf;
}

}  // namespace detail

inline LineTimetable parse_timetable(std::istream& in) {
  static constexpr std::array<std::string_view, 6> columns{"day",      "line_id", "start",
                                                           "end",      "bus_type", "soc_after_kwh"};
  const auto rows = detail::read_csv(in, columns);
  LineTimetable table;
  std::set<std::pair<unsigned, std::string>> seen;
  for (const auto& row : rows) {
    const auto& f = row.fields;
    TimetableEntry entry;
    const auto day = std::find(kDayTokens.begin(), kDayTokens.end(), f[0]);
    if (day == kDayTokens.end()) throw SchemaError("unknown day '" + f[0] + "'", row.number, "day");
    entry.day = static_cast<unsigned>(day - kDayTokens.begin());
    if (f[1].empty()) throw SchemaError("empty line id", row.number, "line_id");
    entry.line_id = f[1];
    if (!seen.emplace(entry.day, entry.line_id).second) {
      throw SchemaError("duplicate line '" + f[1] + "' on " + f[0], row.number, "line_id");
    }
    const auto start = detail::parse_clock(f[2]);
    if (!start) throw SchemaError("not a clock time: '" + f[2] + "'", row.number, "start");
    const auto end = detail::parse_clock(f[3]);
    if (!end) throw SchemaError("not a clock time: '" + f[3] + "'", row.number, "end");
    if (!(*start < *end)) throw SchemaError("end must be after start", row.number, "end");
    entry.start = *start;
    entry.end = *end;
    const auto type = parse_bus_type(f[4]);
    if (!type) throw SchemaError("unknown bus type '" + f[4] + "'", row.number, "bus_type");
    entry.bus_type = *type;
    entry.soc_after = detail::parse_number(f[5], row.number, "soc_after_kwh");
    if (!(entry.soc_after >= 0.0) || entry.soc_after > battery_capacity(entry.bus_type)) {
      throw SchemaError("state of charge outside [0, battery capacity]", row.number,
                        "soc_after_kwh");
    }
    table.entries.push_back(std::move(entry));
  }
  return table;
}

inline LineTimetable load_timetable(const std::string& path) {
  auto in = detail::open_input(path);
  return parse_timetable(in);
}

inline void write_timetable(std::ostream& out, const LineTimetable& table) {
  out << "day,line_id,start,end,bus_type,soc_after_kwh\n";
  for (const auto& e : table.entries) {
    out << kDayTokens.at(e.day) << ',' << e.line_id << ',' << detail::format_clock(e.start) << ','
        << detail::format_clock(e.end) << ',' << to_string(e.bus_type) << ','
        << detail::format_number(e.soc_after) << '\n';
  }
}

inline void write_timetable(const std::string& path, const LineTimetable& table) {
  auto out = detail::open_output(path);
  write_timetable(out, table);
}

// ---------------------------------------------------------------------------
// Result files

struct ProfileColumn {
  std::string scenario;
  std::vector<double> charging;  // kWh per interval
};

/// One row per interval; energies converted to average power (kW).
inline void write_profiles(std::ostream& out, const Horizon& horizon,
                           const BaseloadSeries& baseload, std::span<const ProfileColumn> columns,
                           const EmissionSeries& emissions) {
  const std::size_t m = horizon.size();
  if (baseload.values.size() != m || emissions.factors.size() != m) {
    throw InvalidInput("profile series must match the horizon");
  }
  out << "timestamp,baseload_kw";
  for (const auto& column : columns) {
    if (column.charging.size() != m) throw InvalidInput("profile column length mismatch");
    out << ',' << column.scenario << "_kw";
  }
  out << ",co2_factor\n";
  const double hours = horizon.interval_hours();
  for (std::size_t i = 0; i < m; ++i) {
    out << format_timestamp(horizon.interval_start(i)) << ','
        << detail::format_fixed(baseload.values[i] / hours);
    for (const auto& column : columns) out << ',' << detail::format_fixed(column.charging[i] / hours);
    out << ',' << detail::format_fixed(emissions.factors[i]) << '\n';
  }
}

inline void write_profiles(const std::string& path, const Horizon& horizon,
                           const BaseloadSeries& baseload, std::span<const ProfileColumn> columns,
                           const EmissionSeries& emissions) {
  auto out = detail::open_output(path);
  write_profiles(out, horizon, baseload, columns, emissions);
}

/// Reductions are relative to the report labelled `reference` when present.
inline void write_report(std::ostream& out, std::span<const ScenarioReport> reports,
                         std::string_view reference = "uncontrolled") {
  out << "scenario,F,C,P,F_reduction_pct,C_reduction_pct,P_reduction_pct\n";
  const ScenarioReport* ref = nullptr;
  for (const auto& report : reports) {
    if (report.label == reference) ref = &report;
  }
  for (const auto& report : reports) {
    out << report.label << ',' << detail::format_number(report.F) << ','
        << detail::format_number(report.C) << ',' << detail::format_number(report.P);
    if (ref) {
      const auto r = report.reduction_against(*ref);
      out << ',' << detail::format_number(r.F) << ',' << detail::format_number(r.C) << ','
          << detail::format_number(r.P) << '\n';
    } else {
      out << ",,,\n";
    }
  }
}

inline void write_report(const std::string& path, std::span<const ScenarioReport> reports,
                         std::string_view reference = "uncontrolled") {
  auto out = detail::open_output(path);
  write_report(out, reports, reference);
}

inline std::vector<ScenarioReport> parse_report(std::istream& in) {
  static constexpr std::array<std::string_view, 7> columns{
      "scenario", "F", "C", "P", "F_reduction_pct", "C_reduction_pct", "P_reduction_pct"};
  std::vector<ScenarioReport> reports;
  for (const auto& row : detail::read_csv(in, columns)) {
    ScenarioReport report;
    report.label = row.fields[0];
    report.F = detail::parse_number(row.fields[1], row.number, "F");
    report.C = detail::parse_number(row.fields[2], row.number, "C");
    report.P = detail::parse_number(row.fields[3], row.number, "P");
    reports.push_back(std::move(report));
  }
  return reports;
}

struct SweepPoint {
  double w_f = 0.0;
  double P = 0.0;
  double C = 0.0;
  double F = 0.0;
};

inline void write_sweep(std::ostream& out, std::span<const SweepPoint> points) {
  out << "w_f,P,C,F\n";
  for (const auto& p : points) {
    out << detail::format_number(p.w_f) << ',' << detail::format_number(p.P) << ','
        << detail::format_number(p.C) << ',' << detail::format_number(p.F) << '\n';
  }
}

inline void write_sweep(const std::string& path, std::span<const SweepPoint> points) {
  auto out = detail::open_output(path);
  write_sweep(out, points);
}

inline std::vector<SweepPoint> parse_sweep(std::istream& in) {
  static constexpr std::array<std::string_view, 4> columns{"w_f", "P", "C", "F"};
  std::vector<SweepPoint> points;
  for (const auto& row : detail::read_csv(in, columns)) {
    points.push_back({detail::parse_number(row.fields[0], row.number, "w_f"),
                      detail::parse_number(row.fields[1], row.number, "P"),
                      detail::parse_number(row.fields[2], row.number, "C"),
                      detail::parse_number(row.fields[3], row.number, "F")});
  }
  return points;
}

}  // namespace busched
