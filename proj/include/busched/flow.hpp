#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "busched/errors.hpp"
#include "busched/model.hpp"

// Exact CO2 minimisation as a minimum-cost flow.
//
// Network layout: source -> job (capacity e_j) -> interval (capacity l_j,
// one arc per available interval) -> sink (capacity g_i, cost co2(i)).
// Energies and costs are scaled to integers so the flow is exact; a
// unit of flow is one Wh by default.

namespace busched {

struct FlowScaling {
  double energy = 1e3;  // flow units per kWh
  double cost = 1e6;    // cost units per kg CO2eq/kWh
};

struct FlowArc {
  std::size_t from;
  std::size_t to;
  std::int64_t capacity;
  std::int64_t cost;
};

class FlowNetwork {
 public:
  FlowNetwork(std::size_t job_count, std::size_t interval_count)
      : jobs_(job_count), intervals_(interval_count), job_arc_begin_(job_count + 1, 0) {}

  std::size_t job_count() const noexcept { return jobs_; }
  std::size_t interval_count() const noexcept { return intervals_; }
  std::size_t node_count() const noexcept { return jobs_ + intervals_ + 2; }
  std::size_t source() const noexcept { return 0; }
  std::size_t sink() const noexcept { return jobs_ + intervals_ + 1; }
  std::size_t job_node(std::size_t j) const noexcept { return 1 + j; }
  std::size_t interval_node(std::size_t i) const noexcept { return 1 + jobs_ + i; }

  const std::vector<FlowArc>& arcs() const noexcept { return arcs_; }
  std::size_t arc_count() const noexcept { return arcs_.size(); }

  // Arc index ranges: source arcs [0, n), job->interval arcs of job j in
  // [job_arcs_begin(j), job_arcs_end(j)), sink arcs after all job arcs.
  std::size_t source_arc(std::size_t j) const noexcept { return j; }
  std::size_t job_arcs_begin(std::size_t j) const noexcept { return job_arc_begin_[j]; }
  std::size_t job_arcs_end(std::size_t j) const noexcept { return job_arc_begin_[j + 1]; }
  std::size_t sink_arc(std::size_t i) const noexcept { return sink_arc_begin_ + i; }

  double energy_scale() const noexcept { return energy_scale_; }
  double cost_scale() const noexcept { return cost_scale_; }

  std::int64_t required_flow() const noexcept {
    std::int64_t total = 0;
    for (std::size_t j = 0; j < jobs_; ++j) total += arcs_[j].capacity;
    return total;
  }

 private:
  friend FlowNetwork build_network(const Instance&, const EmissionSeries&, FlowScaling);

  std::size_t jobs_;
  std::size_t intervals_;
  std::vector<FlowArc> arcs_;
  std::vector<std::size_t> job_arc_begin_;
  std::size_t sink_arc_begin_ = 0;
  double energy_scale_ = 1.0;
  double cost_scale_ = 1.0;
};

namespace detail {

// Keeps every capacity and every path/total cost comfortably inside int64.
inline constexpr double kMaxScaled = 4.0e18;

inline std::int64_t scale_checked(double value, double scale, const char* what) {
  const double scaled = std::round(value * scale);
  if (!std::isfinite(scaled) || std::abs(scaled) > 9.0e15) {
    throw ScalingOverflow(std::string(what) + " does not fit the integer flow range");
  }
  return static_cast<std::int64_t>(scaled);
}

}  // namespace detail

inline FlowNetwork build_network(const Instance& instance, const EmissionSeries& emissions,
                                 FlowScaling scaling = {}) {
  const std::size_t n = instance.job_count();
  const std::size_t m = instance.interval_count();
  if (emissions.factors.size() != m) {
    throw InvalidInput("emission series length does not match the horizon");
  }
  for (double c : emissions.factors) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw InvalidInput("emission factors must be finite and non-negative");
    }
  }

  FlowNetwork net(n, m);
  net.energy_scale_ = scaling.energy;
  net.cost_scale_ = scaling.cost;

  std::int64_t total_supply = 0;
  std::int64_t rate_sum = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const Job& job = instance.job(j);
    const auto cap = detail::scale_checked(job.energy, scaling.energy, "job energy");
    net.arcs_.push_back({net.source(), net.job_node(j), cap, 0});
    total_supply += cap;
    rate_sum += detail::scale_checked(job.max_rate, scaling.energy, "job rate");
  }
  for (std::size_t j = 0; j < n; ++j) {
    const Job& job = instance.job(j);
    const auto rate = detail::scale_checked(job.max_rate, scaling.energy, "job rate");
    net.job_arc_begin_[j] = net.arcs_.size();
    for (std::size_t i = job.arrival; i < job.departure; ++i) {
      net.arcs_.push_back({net.job_node(j), net.interval_node(i), rate, 0});
    }
  }
  net.job_arc_begin_[n] = net.arcs_.size();
  net.sink_arc_begin_ = net.arcs_.size();

  std::int64_t max_cost = 0;
  const auto& caps = instance.global_caps();
  for (std::size_t i = 0; i < m; ++i) {
    std::int64_t cap = rate_sum;
    if (caps) cap = std::min(cap, detail::scale_checked((*caps)[i], scaling.energy, "global cap"));
    const auto cost = detail::scale_checked(emissions.factors[i], scaling.cost, "emission factor");
    max_cost = std::max(max_cost, cost);
    net.arcs_.push_back({net.interval_node(i), net.sink(), cap, cost});
  }

  // Only sink arcs carry cost, so the total cost is at most max_cost * supply
  // and any residual path (hence any potential) at most max_cost * nodes.
  const double total_cost = static_cast<double>(max_cost) * static_cast<double>(total_supply);
  const double path_cost = static_cast<double>(max_cost) * static_cast<double>(net.node_count());
  if (static_cast<double>(rate_sum) > 9.0e15 || total_cost > detail::kMaxScaled ||
      path_cost > detail::kMaxScaled) {
    throw ScalingOverflow("scaled costs times flow exceed the integer range");
  }
  return net;
}

struct FlowSolution {
  std::vector<std::int64_t> flow;  // per forward arc of the network
  std::int64_t value = 0;
  std::int64_t cost = 0;
};

/// Successive shortest augmenting paths with node potentials (Dijkstra on
/// reduced costs). Sends up to `limit` units from source to sink; the
/// result is a minimum-cost flow of its value.
inline FlowSolution min_cost_flow(const FlowNetwork& net,
                                  std::int64_t limit = std::numeric_limits<std::int64_t>::max()) {
  struct Residual {
    std::size_t to;
    std::int64_t cap;
    std::int64_t cost;
  };
  const std::size_t v_count = net.node_count();
  const auto& arcs = net.arcs();
  std::vector<Residual> res;
  res.reserve(arcs.size() * 2);
  std::vector<std::vector<std::size_t>> adj(v_count);
  for (const FlowArc& a : arcs) {
    adj[a.from].push_back(res.size());
    res.push_back({a.to, a.capacity, a.cost});
    adj[a.to].push_back(res.size());
    res.push_back({a.from, 0, -a.cost});
  }

  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> potential(v_count, 0);  // all costs start non-negative
  std::vector<std::int64_t> dist(v_count);
  std::vector<std::size_t> via(v_count);
  std::vector<char> done(v_count);
  const std::size_t s = net.source();
  const std::size_t t = net.sink();

  FlowSolution out;
  using Entry = std::pair<std::int64_t, std::size_t>;
  while (out.value < limit) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(done.begin(), done.end(), 0);
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist[s] = 0;
    heap.push({0, s});
    while (!heap.empty()) {
      const auto [d, v] = heap.top();
      heap.pop();
      if (done[v]) continue;
      done[v] = 1;
      for (std::size_t r : adj[v]) {
        const Residual& e = res[r];
        if (e.cap <= 0) continue;
        const std::int64_t nd = d + e.cost + potential[v] - potential[e.to];
        if (nd < dist[e.to]) {
          dist[e.to] = nd;
          via[e.to] = r;
          heap.push({nd, e.to});
        }
      }
    }
    if (dist[t] >= kInf) break;
    for (std::size_t v = 0; v < v_count; ++v) potential[v] += std::min(dist[v], dist[t]);

    std::int64_t push = limit - out.value;
    for (std::size_t v = t; v != s; v = res[via[v] ^ 1].to) push = std::min(push, res[via[v]].cap);
    for (std::size_t v = t; v != s; v = res[via[v] ^ 1].to) {
      res[via[v]].cap -= push;
      res[via[v] ^ 1].cap += push;
      out.cost += push * res[via[v]].cost;
    }
    out.value += push;
  }

  out.flow.resize(arcs.size());
  for (std::size_t k = 0; k < arcs.size(); ++k) out.flow[k] = res[2 * k + 1].cap;
  return out;
}

struct OptimalityVerdict {
  bool optimal = true;
  std::vector<std::size_t> cycle;  // nodes of a negative residual cycle, if any
  std::int64_t cycle_cost = 0;

  explicit operator bool() const noexcept { return optimal; }
};

/// Bellman-Ford search for a negative-cost cycle in the residual graph of
/// `solution`; absent such a cycle the flow is cost-minimal for its value.
inline OptimalityVerdict verify_optimality(const FlowNetwork& net, const FlowSolution& solution) {
  struct Edge {
    std::size_t from;
    std::size_t to;
    std::int64_t cost;
  };
  std::vector<Edge> edges;
  const auto& arcs = net.arcs();
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const FlowArc& a = arcs[k];
    if (solution.flow[k] < a.capacity) edges.push_back({a.from, a.to, a.cost});
    if (solution.flow[k] > 0) edges.push_back({a.to, a.from, -a.cost});
  }

  const std::size_t v_count = net.node_count();
  std::vector<std::int64_t> dist(v_count, 0);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> pred(v_count, kNone);
  std::size_t relaxed = kNone;
  for (std::size_t round = 0; round < v_count; ++round) {
    relaxed = kNone;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const Edge& e = edges[k];
      if (dist[e.from] + e.cost < dist[e.to]) {
        dist[e.to] = dist[e.from] + e.cost;
        pred[e.to] = k;
        relaxed = e.to;
      }
    }
    if (relaxed == kNone) return {};
  }

  OptimalityVerdict verdict;
  verdict.optimal = false;
  std::size_t v = relaxed;
  for (std::size_t k = 0; k < v_count; ++k) v = edges[pred[v]].from;
  const std::size_t start = v;
  do {
    verdict.cycle.push_back(v);
    verdict.cycle_cost += edges[pred[v]].cost;
    v = edges[pred[v]].from;
  } while (v != start);
  std::reverse(verdict.cycle.begin(), verdict.cycle.end());
  return verdict;
}

namespace detail {

// Moves rounding residue (below one flow unit per arc) so that every job
// receives exactly e_j, preferring low-emission intervals when adding and
// high-emission intervals when removing.
inline void settle_rounding(const Instance& instance, const EmissionSeries& emissions,
                            Schedule& schedule) {
  const auto& caps = instance.global_caps();
  auto s = aggregate(schedule);
  for (std::size_t j = 0; j < instance.job_count(); ++j) {
    const Job& job = instance.job(j);
    auto row = schedule.row(j);
    for (std::size_t k = 0; k < row.size(); ++k) {
      const double clamped = std::clamp(row[k], 0.0, job.max_rate);
      s[job.arrival + k] += clamped - row[k];
      row[k] = clamped;
    }
    std::vector<std::size_t> order(row.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return emissions.factors[job.arrival + a] < emissions.factors[job.arrival + b];
    });
    double delta = job.energy - schedule.delivered(j);
    if (delta > 0.0) {
      for (std::size_t k : order) {
        const std::size_t i = job.arrival + k;
        double room = job.max_rate - row[k];
        if (caps) room = std::min(room, (*caps)[i] - s[i]);
        const double add = std::clamp(delta, 0.0, std::max(room, 0.0));
        row[k] += add;
        s[i] += add;
        delta -= add;
        if (delta <= 0.0) break;
      }
    } else if (delta < 0.0) {
      for (auto it = order.rbegin(); it != order.rend() && delta < 0.0; ++it) {
        const double take = std::min(row[*it], -delta);
        row[*it] -= take;
        s[job.arrival + *it] -= take;
        delta += take;
      }
    }
  }
}

}  // namespace detail

/// Schedule minimising C(s) = sum_i s(i) co2(i), honouring global caps if present.
inline Schedule solve_min_co2(const Instance& instance, const EmissionSeries& emissions,
                              FlowScaling scaling = {}) {
  const FlowNetwork net = build_network(instance, emissions, scaling);
  const std::int64_t required = net.required_flow();
  const FlowSolution solution = min_cost_flow(net, required);
  if (solution.value < required) {
    throw Infeasible("maximum flow " + std::to_string(solution.value) + " below required " +
                     std::to_string(required) + " (scaled units)");
  }
  Schedule schedule(instance);
  for (std::size_t j = 0; j < instance.job_count(); ++j) {
    auto row = schedule.row(j);
    const std::size_t begin = net.job_arcs_begin(j);
    for (std::size_t k = 0; k < row.size(); ++k) {
      row[k] = static_cast<double>(solution.flow[begin + k]) / scaling.energy;
    }
  }
  detail::settle_rounding(instance, emissions, schedule);
  return schedule;
}

}  // namespace busched
