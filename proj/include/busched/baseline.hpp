#pragma once

#include <algorithm>
#include <cstddef>

#include "busched/model.hpp"

namespace busched {

/// Uncontrolled charging: every job charges at its maximum rate from
/// arrival until full, the last interval taking the remainder. Ignores
/// global caps and the other jobs.
inline Schedule solve_uncontrolled(const Instance& instance) {
  Schedule schedule(instance);
  for (std::size_t j = 0; j < instance.job_count(); ++j) {
    const Job& job = instance.job(j);
    auto row = schedule.row(j);
    double remaining = job.energy;
    for (std::size_t k = 0; k < row.size() && remaining > 0.0; ++k) {
      row[k] = std::min(job.max_rate, remaining);
      remaining -= row[k];
    }
    if (remaining > 1e-9 * std::max(1.0, job.energy)) {
      throw Infeasible("job '" + job.id + "' cannot be fully charged within its window");
    }
  }
  return schedule;
}

}  // namespace busched
