#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "busched/errors.hpp"
#include "busched/time.hpp"

// Scheduling model shared by every solver.
//
// Energies are kWh per interval throughout; power (kW) only appears when
// reporting, by dividing by the interval length in hours. A job's window is
// the half-open interval range [arrival, departure).

namespace busched {

/// Planning horizon of equal, contiguous intervals.
class Horizon {
 public:
  Horizon(Timestamp start, std::size_t interval_count, double interval_hours = 0.25)
      : start_(start), count_(interval_count), hours_(interval_hours) {
    if (interval_count == 0) throw InvalidInput("horizon needs at least one interval");
    if (!(interval_hours > 0.0) || !std::isfinite(interval_hours)) {
      throw InvalidInput("interval length must be positive");
    }
    step_ = hours_to_seconds(interval_hours);
    if (step_.count() <= 0 || std::abs(seconds_to_hours(step_) - interval_hours) > 1e-12) {
      throw InvalidInput("interval length must be a whole number of seconds");
    }
  }

  Timestamp start() const noexcept { return start_; }
  Timestamp end() const noexcept { return start_ + step_ * static_cast<long>(count_); }
  std::size_t size() const noexcept { return count_; }
  double interval_hours() const noexcept { return hours_; }
  Seconds interval_length() const noexcept { return step_; }
  Timestamp interval_start(std::size_t i) const noexcept {
    return start_ + step_ * static_cast<long>(i);
  }

  /// Index of the first boundary at or after `t`, clamped to [0, size()].
  std::size_t boundary_ceil(Timestamp t) const noexcept {
    if (t <= start_) return 0;
    const auto offset = (t - start_).count();
    const auto k = static_cast<std::size_t>((offset + step_.count() - 1) / step_.count());
    return k > count_ ? count_ : k;
  }

  /// Index of the last boundary at or before `t`, clamped to [0, size()].
  std::size_t boundary_floor(Timestamp t) const noexcept {
    if (t <= start_) return 0;
    const auto k = static_cast<std::size_t>((t - start_).count() / step_.count());
    return k > count_ ? count_ : k;
  }

 private:
  Timestamp start_;
  std::size_t count_;
  double hours_;
  Seconds step_{};
};

struct Job {
  std::string id;
  std::size_t arrival = 0;    // first available interval
  std::size_t departure = 0;  // one past the last available interval
  double energy = 0.0;        // kWh to deliver
  double max_rate = 0.0;      // kWh per interval

  std::size_t window() const noexcept { return departure - arrival; }
  bool available(std::size_t interval) const noexcept {
    return arrival <= interval && interval < departure;
  }
};

/// Per-interval series in kWh per interval (baseload) ...
struct BaseloadSeries {
  std::vector<double> values;
};

/// ... and in kg CO2eq per kWh (emission factors).
struct EmissionSeries {
  std::vector<double> factors;
};

class Instance {
 public:
  Instance(Horizon horizon, std::vector<Job> jobs,
           std::optional<std::vector<double>> global_caps = std::nullopt)
      : horizon_(std::move(horizon)), jobs_(std::move(jobs)), caps_(std::move(global_caps)) {
    const std::size_t m = horizon_.size();
    for (const Job& job : jobs_) {
      if (!(job.arrival < job.departure) || job.departure > m) {
        throw InvalidInput("job '" + job.id + "' has a window outside the horizon");
      }
      if (!(job.energy >= 0.0) || !std::isfinite(job.energy)) {
        throw InvalidInput("job '" + job.id + "' has a negative or non-finite energy");
      }
      if (!(job.max_rate > 0.0) || !std::isfinite(job.max_rate)) {
        throw InvalidInput("job '" + job.id + "' needs a positive maximum rate");
      }
    }
    if (caps_) {
      if (caps_->size() != m) throw InvalidInput("global caps must have one entry per interval");
      for (double g : *caps_) {
        if (!(g >= 0.0) || std::isnan(g)) throw InvalidInput("global caps must be non-negative");
      }
    }
  }

  const Horizon& horizon() const noexcept { return horizon_; }
  std::size_t interval_count() const noexcept { return horizon_.size(); }
  std::span<const Job> jobs() const noexcept { return jobs_; }
  std::size_t job_count() const noexcept { return jobs_.size(); }
  const Job& job(std::size_t j) const { return jobs_.at(j); }
  const std::optional<std::vector<double>>& global_caps() const noexcept { return caps_; }

  double total_energy() const noexcept {
    double total = 0.0;
    for (const Job& job : jobs_) total += job.energy;
    return total;
  }

  /// Same jobs and horizon without global caps.
  Instance without_caps() const { return Instance(horizon_, jobs_); }

 private:
  Horizon horizon_;
  std::vector<Job> jobs_;
  std::optional<std::vector<double>> caps_;
};

/// Energy allocations e(i, j), stored densely over each job's window only.
class Schedule {
 public:
  explicit Schedule(const Instance& instance) : interval_count_(instance.interval_count()) {
    rows_.reserve(instance.job_count());
    for (const Job& job : instance.jobs()) {
      rows_.push_back(Row{job.arrival, std::vector<double>(job.window(), 0.0)});
    }
  }

  std::size_t interval_count() const noexcept { return interval_count_; }
  std::size_t job_count() const noexcept { return rows_.size(); }
  std::size_t first_interval(std::size_t j) const { return rows_.at(j).first; }
  std::size_t end_interval(std::size_t j) const {
    const Row& row = rows_.at(j);
    return row.first + row.energy.size();
  }

  std::span<const double> row(std::size_t j) const { return rows_.at(j).energy; }
  std::span<double> row(std::size_t j) { return rows_.at(j).energy; }

  double at(std::size_t j, std::size_t interval) const {
    const Row& row = rows_.at(j);
    if (interval < row.first || interval >= row.first + row.energy.size()) return 0.0;
    return row.energy[interval - row.first];
  }

  /// Mutable access; only defined inside the job's window.
  double& at(std::size_t j, std::size_t interval) {
    Row& row = rows_.at(j);
    if (interval < row.first || interval >= row.first + row.energy.size()) {
      throw InvalidInput("allocation outside the job's availability window");
    }
    return row.energy[interval - row.first];
  }

  double delivered(std::size_t j) const {
    double total = 0.0;
    for (double e : rows_.at(j).energy) total += e;
    return total;
  }

 private:
  struct Row {
    std::size_t first;
    std::vector<double> energy;
  };
  std::size_t interval_count_;
  std::vector<Row> rows_;
};

/// J(i) and its transpose J^-1(j), with jobs identified by index.
struct Availability {
  std::vector<std::vector<std::size_t>> jobs_at;       // interval -> jobs
  std::vector<std::vector<std::size_t>> intervals_of;  // job -> intervals
};

inline Availability availability(const Instance& instance) {
  Availability result;
  result.jobs_at.resize(instance.interval_count());
  result.intervals_of.resize(instance.job_count());
  for (std::size_t j = 0; j < instance.job_count(); ++j) {
    const Job& job = instance.job(j);
    for (std::size_t i = job.arrival; i < job.departure; ++i) {
      result.jobs_at[i].push_back(j);
      result.intervals_of[j].push_back(i);
    }
  }
  return result;
}

/// s(i) = sum over jobs of e(i, j).
inline std::vector<double> aggregate(const Schedule& schedule) {
  std::vector<double> s(schedule.interval_count(), 0.0);
  for (std::size_t j = 0; j < schedule.job_count(); ++j) {
    const auto row = schedule.row(j);
    const std::size_t first = schedule.first_interval(j);
    for (std::size_t k = 0; k < row.size(); ++k) s[first + k] += row[k];
  }
  return s;
}

/// First violated charging constraint, if any. Global caps are only
/// checked when `check_caps` is set and the instance carries them.
inline std::optional<std::string> find_violation(const Instance& instance, const Schedule& schedule,
                                                 double tolerance = 1e-6,
                                                 bool check_caps = true) {
  if (schedule.job_count() != instance.job_count() ||
      schedule.interval_count() != instance.interval_count()) {
    return "schedule shape does not match the instance";
  }
  for (std::size_t j = 0; j < instance.job_count(); ++j) {
    const Job& job = instance.job(j);
    if (schedule.first_interval(j) != job.arrival || schedule.end_interval(j) != job.departure) {
      return "job '" + job.id + "': allocation row does not match its window";
    }
    double total = 0.0;
    for (double e : schedule.row(j)) {
      if (!std::isfinite(e)) return "job '" + job.id + "': non-finite allocation";
      if (e < -tolerance) return "job '" + job.id + "': negative allocation";
      if (e > job.max_rate + tolerance) return "job '" + job.id + "': rate limit exceeded";
      total += e;
    }
    if (total < job.energy - tolerance) return "job '" + job.id + "': energy requirement not met";
  }
  if (check_caps && instance.global_caps()) {
    const auto s = aggregate(schedule);
    const auto& caps = *instance.global_caps();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] > caps[i] + tolerance) {
        return "interval " + std::to_string(i) + ": global capacity exceeded";
      }
    }
  }
  return std::nullopt;
}

}  // namespace busched
