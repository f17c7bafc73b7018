#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <vector>

#include "busched/data.hpp"
#include "busched/errors.hpp"
#include "busched/matching.hpp"
#include "busched/model.hpp"
#include "busched/time.hpp"

// Turns a weekly timetable into the charging jobs of a horizon: every service
// day's arrivals are matched against the following day's lines.

namespace busched {

struct DayMatching {
  std::chrono::sys_days date;
  unsigned weekday = 0;        // 0 = Monday
  std::size_t arrivals = 0;    // buses arriving inside the horizon
  std::size_t next_lines = 0;  // lines of the following day
  std::size_t matched = 0;
};

struct WeekPlan {
  std::vector<Job> jobs;
  std::vector<LineRecord> buses;  // arriving bus of each job, same order
  std::vector<DayMatching> days;
};

/// Jobs for all buses whose line ends inside the horizon. Matched buses
/// charge until their next line starts; unmatched ones until the end of the
/// following day, clipped to the horizon.
inline WeekPlan build_week(const LineTimetable& timetable, const Horizon& horizon,
                           double charge_rate_kw = 30.0) {
  ChargingRules rules{charge_rate_kw, horizon.interval_length()};
  WeekPlan plan;
  using std::chrono::days;
  const auto first = std::chrono::floor<days>(horizon.start()) - days{1};
  const auto last = std::chrono::floor<days>(horizon.end());
  for (auto date = first; date <= last; date += days{1}) {
    const unsigned weekday = iso_weekday_index(Timestamp{date});
    std::vector<LineRecord> arriving;
    for (LineRecord& line : timetable.lines_on(weekday, date)) {
      if (line.end >= horizon.start() && line.end < horizon.end()) arriving.push_back(std::move(line));
    }
    if (arriving.empty()) continue;
    const auto next_date = date + days{1};
    const auto next_lines = timetable.lines_on(iso_weekday_index(Timestamp{next_date}), next_date);
    const Timestamp fallback{next_date + days{1}};
    const auto graph = build_edges(arriving, next_lines, rules, fallback);
    const auto assignment = match(graph);
    auto jobs = to_jobs(arriving, assignment, horizon, rules);
    plan.days.push_back({date, weekday, arriving.size(), next_lines.size(), assignment.matched});
    for (std::size_t b = 0; b < jobs.size(); ++b) {
      plan.jobs.push_back(std::move(jobs[b]));
      plan.buses.push_back(arriving[b]);
    }
  }
  return plan;
}

/// The default week: 672 quarter-hour intervals from Monday 14:00, before the
/// first evening arrival, so every overnight dwell lies inside the horizon.
inline Horizon default_week_horizon() {
  return Horizon(*parse_timestamp("2023-06-05T14:00:00"), 672, 0.25);
}

}  // namespace busched
