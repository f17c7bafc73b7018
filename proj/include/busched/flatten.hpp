#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "busched/errors.hpp"
#include "busched/feasibility.hpp"
#include "busched/maxflow.hpp"
#include "busched/model.hpp"

// Exact minimiser of F(s) = sum_i (s(i) + b(i))^2 under the charging
// constraints.
//
// The optimum minimises the highest level max_i (s(i) + b(i)) and, below the
// top, recursively does the same for what remains. The top level lambda* is the
// smallest lambda such that a max flow with interval capacities
// max(0, lambda - b(i)) delivers every job's energy. lambda* is found by Newton
// steps on min-cut capacity functions: given a min cut S at lambda < lambda*,
// the cut's capacity is a piecewise-linear function of lambda that reaches the
// total demand at the next iterate, which never overshoots lambda*. The cut that
// certifies lambda* fixes its intervals at level lambda* and its jobs at full
// rate everywhere outside those intervals (the critical set); the rest is
// solved again with those fixed rates added to the baseload.

namespace busched {

struct FlattenProblem {
  Instance instance;
  BaseloadSeries baseload;
};

/// Per-interval totals s(i) + b(i).
inline std::vector<double> levels(std::span<const double> s, std::span<const double> baseload) {
  if (s.size() != baseload.size()) throw InvalidInput("profile and baseload lengths differ");
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] + baseload[i];
  return out;
}

inline std::vector<double> levels(const Schedule& schedule, const BaseloadSeries& baseload) {
  const auto s = aggregate(schedule);
  return levels(s, baseload.values);
}

namespace detail {

/// lambda with sum_k max(0, lambda - bases[k]) == amount. `bases` non-empty.
inline double water_level(std::vector<double> bases, double amount) {
  std::sort(bases.begin(), bases.end());
  double prefix = 0.0;
  for (std::size_t k = 1; k <= bases.size(); ++k) {
    prefix += bases[k - 1];
    const double level = (amount + prefix) / static_cast<double>(k);
    if (k == bases.size() || level <= bases[k]) return level;
  }
  return bases.back();
}

class LevelPeeler {
 public:
  LevelPeeler(const Instance& instance, std::span<const double> baseload, Schedule& out)
      : instance_(instance), base_(baseload.begin(), baseload.end()), out_(out) {
    const std::size_t n = instance.job_count();
    jobs_.resize(n);
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < n; ++j) {
      const Job& job = instance.job(j);
      jobs_[j].demand = job.energy;
      jobs_[j].rate = job.max_rate;
      for (std::size_t i = job.arrival; i < job.departure; ++i) jobs_[j].intervals.push_back(i);
      if (job.energy > 0.0) active.push_back(j);
    }
    for (auto& component : split_components(active)) pending_.push_back(std::move(component));
  }

  void run() {
    while (!pending_.empty()) {
      std::vector<std::size_t> component = std::move(pending_.back());
      pending_.pop_back();
      auto rest = peel(component);
      for (auto& part : split_components(rest)) pending_.push_back(std::move(part));
    }
  }

 private:
  struct WorkJob {
    double demand = 0.0;
    double rate = 0.0;
    std::vector<std::size_t> intervals;  // still-open intervals of the window
  };

  // Jobs connected through shared open intervals.
  std::vector<std::vector<std::size_t>> split_components(const std::vector<std::size_t>& jobs) {
    std::vector<std::size_t> parent(jobs.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::vector<std::size_t> owner(instance_.interval_count(), kNone);
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      for (std::size_t i : jobs_[jobs[k]].intervals) {
        if (owner[i] == kNone) {
          owner[i] = k;
        } else {
          parent[find(k)] = find(owner[i]);
        }
      }
    }
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::size_t> slot(jobs.size(), kNone);
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      const std::size_t root = find(k);
      if (slot[root] == kNone) {
        slot[root] = groups.size();
        groups.emplace_back();
      }
      groups[slot[root]].push_back(jobs[k]);
    }
    return groups;
  }

  // Fixes the top critical set of a connected component and returns the
  // jobs left to schedule.
  std::vector<std::size_t> peel(const std::vector<std::size_t>& jobs) {
    // Local numbering: source 0, jobs 1..J, intervals J+1..J+I, sink J+I+1.
    std::vector<std::size_t> intervals;
    std::vector<std::size_t> local(instance_.interval_count(), kNone);
    double total = 0.0;
    double scale = 1.0;
    for (std::size_t j : jobs) {
      total += jobs_[j].demand;
      scale = std::max({scale, jobs_[j].demand, jobs_[j].rate});
      for (std::size_t i : jobs_[j].intervals) {
        if (local[i] == kNone) {
          local[i] = intervals.size();
          intervals.push_back(i);
        }
      }
    }
    const std::size_t job_n = jobs.size();
    const std::size_t int_n = intervals.size();
    const std::size_t source = 0;
    const std::size_t sink = job_n + int_n + 1;
    const double tolerance = 1e-11 * std::max(1.0, total);

    struct Solved {
      MaxFlowGraph<double> graph;
      std::vector<std::vector<std::size_t>> job_arcs;
    };
    auto solve_at = [&](double lambda) {
      Solved solved{MaxFlowGraph<double>(job_n + int_n + 2, 1e-13 * scale), {}};
      solved.job_arcs.resize(job_n);
      for (std::size_t k = 0; k < job_n; ++k) {
        const WorkJob& job = jobs_[jobs[k]];
        solved.graph.add_edge(source, 1 + k, job.demand);
        for (std::size_t i : job.intervals) {
          solved.job_arcs[k].push_back(solved.graph.add_edge(1 + k, 1 + job_n + local[i], job.rate));
        }
      }
      for (std::size_t q = 0; q < int_n; ++q) {
        solved.graph.add_edge(1 + job_n + q, sink, std::max(0.0, lambda - base_[intervals[q]]));
      }
      return solved;
    };

    // Critical cut candidate; starts as the trivial cut holding everything.
    std::vector<char> cut_job(job_n, 1);
    std::vector<char> cut_interval(int_n, 1);
    auto bases_of_cut = [&] {
      std::vector<double> bases;
      for (std::size_t q = 0; q < int_n; ++q) {
        if (cut_interval[q]) bases.push_back(base_[intervals[q]]);
      }
      return bases;
    };

    double lambda = water_level(bases_of_cut(), total);
    Solved solved = solve_at(lambda);
    const std::size_t max_steps = 4 * (job_n + int_n) + 16;
    for (std::size_t step = 0;; ++step) {
      const double delivered = solved.graph.max_flow(source, sink);
      if (delivered >= total - tolerance) break;
      if (step == max_steps) throw Infeasible("flattening level search did not converge");

      const auto side = solved.graph.residual_reachable(source);
      std::fill(cut_job.begin(), cut_job.end(), 0);
      std::fill(cut_interval.begin(), cut_interval.end(), 0);
      double residual = total;
      bool any_interval = false;
      for (std::size_t q = 0; q < int_n; ++q) {
        cut_interval[q] = side[1 + job_n + q] ? 1 : 0;
        any_interval = any_interval || cut_interval[q];
      }
      for (std::size_t k = 0; k < job_n; ++k) {
        const WorkJob& job = jobs_[jobs[k]];
        if (!side[1 + k]) {
          residual -= job.demand;
          continue;
        }
        cut_job[k] = 1;
        for (std::size_t i : job.intervals) {
          if (!cut_interval[local[i]]) residual -= job.rate;
        }
      }
      if (!any_interval) throw Infeasible("jobs cannot be scheduled within their windows");
      const double next = water_level(bases_of_cut(), std::max(residual, 0.0));
      if (!(next > lambda)) break;  // converged to floating-point resolution
      lambda = next;
      solved = solve_at(lambda);
    }

    // Record the critical jobs; their rates outside the critical intervals
    // become baseload for the remainder.
    std::vector<std::size_t> rest;
    for (std::size_t k = 0; k < job_n; ++k) {
      const std::size_t j = jobs[k];
      if (!cut_job[k]) {
        rest.push_back(j);
        continue;
      }
      WorkJob& job = jobs_[j];
      for (std::size_t p = 0; p < job.intervals.size(); ++p) {
        const std::size_t i = job.intervals[p];
        double e = std::clamp(solved.graph.flow(solved.job_arcs[k][p]), 0.0, job.rate);
        if (!cut_interval[local[i]]) {
          e = job.rate;
          base_[i] += e;
        }
        out_.at(j, i) += e;
      }
      job.demand = 0.0;
      job.intervals.clear();
    }
    for (std::size_t j : rest) {
      auto& open = jobs_[j].intervals;
      std::erase_if(open, [&](std::size_t i) { return cut_interval[local[i]] != 0; });
      if (open.empty() && jobs_[j].demand > 1e-9) {
        throw Infeasible("job left without open intervals while flattening");
      }
    }
    std::erase_if(rest, [&](std::size_t j) { return jobs_[j].intervals.empty(); });
    return rest;
  }

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  const Instance& instance_;
  std::vector<double> base_;
  Schedule& out_;
  std::vector<WorkJob> jobs_;
  std::vector<std::vector<std::size_t>> pending_;
};

}  // namespace detail

/// Schedule minimising sum_i (s(i) + b(i))^2. Global caps are not supported.
inline Schedule solve_flatten(const FlattenProblem& problem) {
  const Instance& instance = problem.instance;
  if (instance.global_caps()) {
    throw InvalidInput("flattening does not support global capacity limits");
  }
  if (problem.baseload.values.size() != instance.interval_count()) {
    throw InvalidInput("baseload length does not match the horizon");
  }
  for (double b : problem.baseload.values) {
    if (!std::isfinite(b)) throw InvalidInput("baseload must be finite");
  }
  if (!check_feasible(instance)) throw Infeasible("instance admits no feasible schedule");

  Schedule schedule(instance);
  detail::LevelPeeler(instance, problem.baseload.values, schedule).run();
  return schedule;
}

/// Local-exchange optimality: moving energy of any job from a higher to a
/// lower level would reduce F. Returns a description of the first
/// violation, or nothing when the schedule is exchange-optimal.
inline std::optional<std::string> exchange_violation(const Instance& instance,
                                                     const Schedule& schedule,
                                                     const BaseloadSeries& baseload,
                                                     double allocation_tol = 1e-6,
                                                     double level_tol = 1e-5) {
  const auto level = levels(schedule, baseload);
  for (std::size_t j = 0; j < instance.job_count(); ++j) {
    const Job& job = instance.job(j);
    double highest_loaded = -std::numeric_limits<double>::infinity();
    double lowest_open = std::numeric_limits<double>::infinity();
    std::size_t from = 0, to = 0;
    for (std::size_t i = job.arrival; i < job.departure; ++i) {
      const double e = schedule.at(j, i);
      if (e > allocation_tol && level[i] > highest_loaded) {
        highest_loaded = level[i];
        from = i;
      }
      if (e < job.max_rate - allocation_tol && level[i] < lowest_open) {
        lowest_open = level[i];
        to = i;
      }
    }
    if (highest_loaded > lowest_open + level_tol) {
      return "job '" + job.id + "' could move energy from interval " + std::to_string(from) +
             " to interval " + std::to_string(to);
    }
  }
  return std::nullopt;
}

}  // namespace busched
