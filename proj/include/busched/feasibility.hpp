#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "busched/maxflow.hpp"
#include "busched/model.hpp"

namespace busched {

struct FeasibilityVerdict {
  bool feasible = false;
  double deliverable = 0.0;  // max-flow value
  double required = 0.0;     // sum of job energies
  // Jobs on the source side of a minimum cut: together they demand more
  // energy than their windows, rates and caps can absorb. Empty when feasible.
  std::vector<std::size_t> violating_jobs;

  explicit operator bool() const noexcept { return feasible; }
};

/// Max-flow saturation test on the job/interval network with costs dropped.
inline FeasibilityVerdict check_feasible(const Instance& instance, double tolerance = 1e-9) {
  const std::size_t n = instance.job_count();
  const std::size_t m = instance.interval_count();
  const std::size_t source = 0;
  const std::size_t sink = n + m + 1;

  double scale = 1.0;
  double rate_sum = 0.0;
  for (const Job& job : instance.jobs()) {
    scale = std::max({scale, job.energy, job.max_rate});
    rate_sum += job.max_rate;
  }
  MaxFlowGraph<double> graph(n + m + 2, 1e-12 * scale);
  for (std::size_t j = 0; j < n; ++j) {
    const Job& job = instance.job(j);
    graph.add_edge(source, 1 + j, job.energy);
    for (std::size_t i = job.arrival; i < job.departure; ++i) {
      graph.add_edge(1 + j, 1 + n + i, job.max_rate);
    }
  }
  const auto& caps = instance.global_caps();
  for (std::size_t i = 0; i < m; ++i) {
    graph.add_edge(1 + n + i, sink, caps ? std::min((*caps)[i], rate_sum) : rate_sum);
  }

  FeasibilityVerdict verdict;
  verdict.required = instance.total_energy();
  verdict.deliverable = graph.max_flow(source, sink);
  verdict.feasible = verdict.deliverable >= verdict.required - tolerance * std::max(1.0, verdict.required);
  if (!verdict.feasible) {
    const auto side = graph.residual_reachable(source);
    for (std::size_t j = 0; j < n; ++j) {
      if (side[1 + j]) verdict.violating_jobs.push_back(j);
    }
  }
  return verdict;
}

}  // namespace busched
