#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <queue>
#include <type_traits>
#include <vector>

namespace busched {

// Dinic's blocking-flow max-flow on an adjacency list with paired residual
// arcs (arc k and k ^ 1 are mutual reverses). Works for integral and
// floating capacities; with floating capacities, residuals at or below
// `epsilon` count as saturated.
template <typename Cap>
class MaxFlowGraph {
 public:
  static_assert(std::is_arithmetic_v<Cap>);

  explicit MaxFlowGraph(std::size_t node_count, Cap epsilon = Cap{})
      : adjacency_(node_count), level_(node_count), cursor_(node_count), epsilon_(epsilon) {}

  std::size_t node_count() const noexcept { return adjacency_.size(); }

  /// Returns the id of the forward arc.
  std::size_t add_edge(std::size_t from, std::size_t to, Cap capacity) {
    const std::size_t id = arcs_.size();
    arcs_.push_back({to, capacity, Cap{}});
    arcs_.push_back({from, Cap{}, Cap{}});
    adjacency_[from].push_back(id);
    adjacency_[to].push_back(id + 1);
    return id;
  }

  Cap flow(std::size_t arc) const { return arcs_[arc].flow; }
  Cap capacity(std::size_t arc) const { return arcs_[arc].capacity; }
  std::size_t head(std::size_t arc) const { return arcs_[arc].to; }
  std::size_t tail(std::size_t arc) const { return arcs_[arc ^ 1].to; }

  /// Augments on top of any existing flow; returns the amount added.
  Cap max_flow(std::size_t source, std::size_t sink) {
    Cap total{};
    while (build_levels(source, sink)) {
      std::fill(cursor_.begin(), cursor_.end(), 0);
      while (true) {
        const Cap pushed = augment(source, sink, std::numeric_limits<Cap>::max());
        if (!(pushed > epsilon_)) break;
        total += pushed;
      }
    }
    return total;
  }

  /// Nodes reachable from `source` in the residual graph: the source side
  /// of the minimum cut once max_flow() has run.
  std::vector<bool> residual_reachable(std::size_t source) const {
    std::vector<bool> seen(adjacency_.size(), false);
    std::vector<std::size_t> stack{source};
    seen[source] = true;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t a : adjacency_[v]) {
        const Arc& arc = arcs_[a];
        if (!seen[arc.to] && residual(arc) > epsilon_) {
          seen[arc.to] = true;
          stack.push_back(arc.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Arc {
    std::size_t to;
    Cap capacity;
    Cap flow;
  };

  static Cap residual(const Arc& arc) { return arc.capacity - arc.flow; }

  bool build_levels(std::size_t source, std::size_t sink) {
    std::fill(level_.begin(), level_.end(), kUnvisited);
    std::queue<std::size_t> queue;
    level_[source] = 0;
    queue.push(source);
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop();
      for (std::size_t a : adjacency_[v]) {
        const Arc& arc = arcs_[a];
        if (level_[arc.to] == kUnvisited && residual(arc) > epsilon_) {
          level_[arc.to] = level_[v] + 1;
          queue.push(arc.to);
        }
      }
    }
    return level_[sink] != kUnvisited;
  }

  Cap augment(std::size_t v, std::size_t sink, Cap limit) {
    if (v == sink) return limit;
    for (std::size_t& k = cursor_[v]; k < adjacency_[v].size(); ++k) {
      const std::size_t a = adjacency_[v][k];
      Arc& arc = arcs_[a];
      if (level_[arc.to] != level_[v] + 1 || !(residual(arc) > epsilon_)) continue;
      const Cap pushed = augment(arc.to, sink, std::min(limit, residual(arc)));
      if (pushed > epsilon_) {
        arc.flow += pushed;
        arcs_[a ^ 1].flow -= pushed;
        return pushed;
      }
    }
    return Cap{};
  }

  static constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();

  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<std::size_t> level_;
  std::vector<std::size_t> cursor_;
  Cap epsilon_;
};

}  // namespace busched
