#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "busched/errors.hpp"
#include "busched/model.hpp"
#include "busched/time.hpp"

// Bus-to-line matching: buses arriving in the evening are assigned to the
// next day's lines by maximum bipartite matching, which fixes the deadline
// of each overnight charging job.

namespace busched {

enum class BusType { Small, Large };

/// Battery capacity in kWh.
constexpr double battery_capacity(BusType type) noexcept {
  return type == BusType::Small ? 122.0 : 273.0;
}

constexpr std::string_view to_string(BusType type) noexcept {
  return type == BusType::Small ? "SMALL" : "LARGE";
}

inline std::optional<BusType> parse_bus_type(std::string_view token) noexcept {
  if (token == "SMALL") return BusType::Small;
  if (token == "LARGE") return BusType::Large;
  return std::nullopt;
}

/// One line driven on a concrete date. The bus driving it returns to the
/// depot at `end` with `soc_after` kWh left.
struct LineRecord {
  std::string line_id;
  Timestamp start;
  Timestamp end;
  BusType bus_type = BusType::Large;
  double soc_after = 0.0;

  double energy_need() const noexcept { return battery_capacity(bus_type) - soc_after; }
};

struct ChargingRules {
  double charge_rate_kw = 30.0;
  Seconds grid = Seconds{900};  // interval length used to round times

  double rate_per_interval() const noexcept { return charge_rate_kw * seconds_to_hours(grid); }
};

/// Earliest grid time at which a bus arriving at `arrival` needing
/// `energy_kwh` is full.
inline Timestamp ready_time(Timestamp arrival, double energy_kwh, const ChargingRules& rules) {
  const Timestamp plugged = ceil_to_grid(arrival, rules.grid);
  const double hours = std::max(energy_kwh, 0.0) / rules.charge_rate_kw;
  return ceil_to_grid(plugged + Seconds{static_cast<long>(std::ceil(hours * 3600.0 - 1e-6))},
                      rules.grid);
}

/// Buses (left) against next-day lines (right).
struct BusLineGraph {
  std::size_t bus_count = 0;
  std::size_t line_count = 0;
  std::vector<std::vector<std::size_t>> adjacency;  // bus -> compatible lines
  std::vector<Timestamp> line_starts;
  Timestamp fallback_deadline{};  // end of the next day

  std::size_t edge_count() const noexcept {
    std::size_t total = 0;
    for (const auto& row : adjacency) total += row.size();
    return total;
  }
};

/// Edge (b, l) iff the types agree and bus b can be fully charged before l starts.
inline BusLineGraph build_edges(std::span<const LineRecord> arriving,
                                std::span<const LineRecord> next_day_lines,
                                const ChargingRules& rules = {},
                                std::optional<Timestamp> fallback_deadline = std::nullopt) {
  if (!(rules.charge_rate_kw > 0.0)) throw InvalidInput("charge rate must be positive");
  BusLineGraph graph;
  graph.bus_count = arriving.size();
  graph.line_count = next_day_lines.size();
  graph.adjacency.resize(arriving.size());
  for (const LineRecord& line : next_day_lines) graph.line_starts.push_back(line.start);
  for (std::size_t b = 0; b < arriving.size(); ++b) {
    const LineRecord& bus = arriving[b];
    const Timestamp ready = ready_time(bus.end, bus.energy_need(), rules);
    for (std::size_t l = 0; l < next_day_lines.size(); ++l) {
      const LineRecord& line = next_day_lines[l];
      if (line.bus_type == bus.bus_type && ready <= line.start) graph.adjacency[b].push_back(l);
    }
  }
  if (fallback_deadline) {
    graph.fallback_deadline = *fallback_deadline;
  } else if (!arriving.empty()) {
    // End of the day after the latest arrival's service day.
    Timestamp latest_end = arriving.front().end;
    Timestamp latest_start = arriving.front().start;
    for (const LineRecord& bus : arriving) {
      latest_end = std::max(latest_end, bus.end);
      latest_start = std::max(latest_start, bus.start);
    }
    graph.fallback_deadline =
        Timestamp{std::chrono::floor<std::chrono::days>(latest_start) + std::chrono::days{2}};
  }
  return graph;
}

struct FleetAssignment {
  std::vector<std::optional<std::size_t>> line_of_bus;  // matched next-day line
  std::vector<Timestamp> deadline;                       // line start, or the fallback
  std::size_t matched = 0;

  std::vector<std::size_t> unmatched() const {
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < line_of_bus.size(); ++b) {
      if (!line_of_bus[b]) out.push_back(b);
    }
    return out;
  }
};

/// Maximum-cardinality matching (Hopcroft-Karp). Unmatched buses get the
/// graph's fallback deadline.
inline FleetAssignment match(const BusLineGraph& graph) {
  constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  const std::size_t buses = graph.bus_count;
  std::vector<std::size_t> line_mate(graph.line_count, kFree);
  std::vector<std::size_t> bus_mate(buses, kFree);
  std::vector<std::size_t> layer(buses, kInf);

  auto bfs = [&] {
    std::queue<std::size_t> queue;
    for (std::size_t b = 0; b < buses; ++b) {
      layer[b] = bus_mate[b] == kFree ? 0 : kInf;
      if (layer[b] == 0) queue.push(b);
    }
    bool reaches_free_line = false;
    while (!queue.empty()) {
      const std::size_t b = queue.front();
      queue.pop();
      for (std::size_t l : graph.adjacency[b]) {
        const std::size_t mate = line_mate[l];
        if (mate == kFree) {
          reaches_free_line = true;
        } else if (layer[mate] == kInf) {
          layer[mate] = layer[b] + 1;
          queue.push(mate);
        }
      }
    }
    return reaches_free_line;
  };

  std::vector<std::size_t> cursor(buses, 0);
  auto dfs = [&](auto&& self, std::size_t b) -> bool {
    for (std::size_t& k = cursor[b]; k < graph.adjacency[b].size(); ++k) {
      const std::size_t l = graph.adjacency[b][k];
      const std::size_t mate = line_mate[l];
      if (mate == kFree || (layer[mate] == layer[b] + 1 && self(self, mate))) {
        line_mate[l] = b;
        bus_mate[b] = l;
        return true;
      }
    }
    layer[b] = kInf;
    return false;
  };

  FleetAssignment out;
  while (bfs()) {
    std::fill(cursor.begin(), cursor.end(), 0);
    for (std::size_t b = 0; b < buses; ++b) {
      if (bus_mate[b] == kFree && dfs(dfs, b)) ++out.matched;
    }
  }
  out.line_of_bus.resize(buses);
  out.deadline.resize(buses, graph.fallback_deadline);
  for (std::size_t b = 0; b < buses; ++b) {
    if (bus_mate[b] != kFree) {
      out.line_of_bus[b] = bus_mate[b];
      out.deadline[b] = graph.line_starts[bus_mate[b]];
    }
  }
  return out;
}

/// One charging job per arriving bus: window from the grid-rounded arrival
/// to the grid-rounded deadline (clipped to the horizon), energy up to a full
/// battery. Throws WindowInfeasible when the window is too short.
inline std::vector<Job> to_jobs(std::span<const LineRecord> arriving,
                                const FleetAssignment& assignment, const Horizon& horizon,
                                const ChargingRules& rules = {}) {
  if (assignment.deadline.size() != arriving.size()) {
    throw InvalidInput("assignment does not cover the arriving buses");
  }
  const double rate = rules.charge_rate_kw * horizon.interval_hours();
  std::vector<Job> jobs;
  jobs.reserve(arriving.size());
  for (std::size_t b = 0; b < arriving.size(); ++b) {
    const LineRecord& bus = arriving[b];
    Job job;
    job.id = bus.line_id + "@" + format_timestamp(bus.end);
    job.arrival = horizon.boundary_ceil(bus.end);
    job.departure = horizon.boundary_floor(assignment.deadline[b]);
    job.energy = std::max(0.0, bus.energy_need());
    job.max_rate = rate;
    if (job.departure <= job.arrival) {
      if (job.energy > 0.0 || job.arrival >= horizon.size()) {
        throw WindowInfeasible("bus of line '" + bus.line_id + "' has no charging window");
      }
      job.departure = job.arrival + 1;
    }
    const double capacity = rate * static_cast<double>(job.window());
    if (job.energy > capacity + 1e-9) {
      throw WindowInfeasible("bus of line '" + bus.line_id + "' needs " +
                             std::to_string(job.energy) + " kWh but its window admits " +
                             std::to_string(capacity) + " kWh");
    }
    jobs.push_back(std::move(job));
  }
  return jobs;
}

}  // namespace busched
