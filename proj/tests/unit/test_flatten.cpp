#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "busched/baseline.hpp"
#include "busched/flatten.hpp"
#include "busched/metrics.hpp"
#include "oracle/oracle.hpp"
#include "support/random_instances.hpp"

using namespace busched;

namespace {

Horizon horizon(std::size_t m) { return Horizon(Timestamp{}, m); }

BaseloadSeries zeros(std::size_t m) { return BaseloadSeries{std::vector<double>(m, 0.0)}; }

double site_F(const Schedule& s, const BaseloadSeries& b) { return metric_F(levels(s, b)); }

}  // namespace

TEST(SolveFlatten, SpreadsASingleJobEvenly) {
  const Instance inst(horizon(4), {Job{"a", 0, 4, 12.0, 10.0}});
  const auto s = solve_flatten({inst, zeros(4)});
  for (double v : aggregate(s)) EXPECT_NEAR(v, 3.0, 1e-9);
}

TEST(SolveFlatten, FillsTheValleyOfTheBaseload) {
  const Instance inst(horizon(2), {Job{"a", 0, 2, 6.0, 10.0}});
  const auto s = aggregate(solve_flatten({inst, BaseloadSeries{{4.0, 0.0}}}));
  EXPECT_NEAR(s[0], 1.0, 1e-9);
  EXPECT_NEAR(s[1], 5.0, 1e-9);
}

TEST(SolveFlatten, RateLimitsForceUnevenLevels) {
  // Job b can only use interval 1, so job a moves away from it.
  const Instance inst(horizon(2), {Job{"a", 0, 2, 4.0, 4.0}, Job{"b", 1, 2, 3.0, 3.0}});
  const auto s = solve_flatten({inst, zeros(2)});
  EXPECT_NEAR(s.at(0, 0), 3.5, 1e-9);
  EXPECT_NEAR(s.at(0, 1), 0.5, 1e-9);
  EXPECT_NEAR(s.at(1, 1), 3.0, 1e-9);
}

TEST(SolveFlatten, MatchesQpOracleOnAMediumInstance) {
  SeededRng rng(11);
  std::vector<Job> jobs;
  for (int j = 0; j < 4; ++j) {
    Job jb{"j" + std::to_string(j), busched::testing::pick(rng, 0, 6), 0, 0.0, 0.0};
    jb.departure = busched::testing::pick(rng, jb.arrival + 1, 8);
    jb.max_rate = rng.uniform(1.0, 6.0);
    jb.energy = rng.uniform(0.2, 1.0) * jb.max_rate * static_cast<double>(jb.window());
    jobs.push_back(jb);
  }
  BaseloadSeries b;
  for (int i = 0; i < 8; ++i) b.values.push_back(rng.uniform(0.0, 5.0));
  const Instance inst(horizon(8), jobs);
  const auto qp = oracle::qp_oracle_flatten(inst, b);
  EXPECT_LE(busched::testing::relative_gap(site_F(solve_flatten({inst, b}), b), qp.objective), 1e-6);
}

TEST(SolveFlatten, MatchesQpOracleOnRandomInstances) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto c = busched::testing::random_case(seed, 5, 12);
    const auto s = solve_flatten({c.instance, c.baseload});
    EXPECT_FALSE(find_violation(c.instance, s)) << "seed " << seed;
    const auto qp = oracle::qp_oracle_flatten(c.instance, c.baseload);
    EXPECT_LE(busched::testing::relative_gap(site_F(s, c.baseload), qp.objective), 1e-6) << "seed " << seed;
    ++checked;
  }
  EXPECT_EQ(checked, 200u);
}

TEST(Levels, AddBaseloadPointwise) {
  EXPECT_EQ(levels(std::vector<double>{1.0, 2.0}, std::vector<double>{0.5, 0.0}),
            (std::vector<double>{1.5, 2.0}));
  EXPECT_THROW(levels(std::vector<double>{1.0}, std::vector<double>{0.5, 0.0}), InvalidInput);
}

TEST(WaterLevel, SolvesTheFillingEquation) {
  EXPECT_DOUBLE_EQ(detail::water_level({4.0, 0.0}, 6.0), 5.0);
  EXPECT_DOUBLE_EQ(detail::water_level({4.0, 0.0}, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(detail::water_level({1.0, 1.0, 1.0}, 0.0), 1.0);
}

TEST(ExchangeCheck, HoldsForSolverOutputAndCatchesAMove) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto c = busched::testing::random_case(seed + 400, 5, 12);
    const auto s = solve_flatten({c.instance, c.baseload});
    EXPECT_FALSE(exchange_violation(c.instance, s, c.baseload)) << "seed " << seed;
  }
  const Instance inst(horizon(2), {Job{"a", 0, 2, 2.0, 2.0}});
  Schedule bad(inst);
  bad.at(0, 0) = 2.0;
  EXPECT_TRUE(exchange_violation(inst, bad, zeros(2)));
}

TEST(SolveFlatten, AggregateIsIndependentOfJobOrder) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto c = busched::testing::random_case(seed + 800, 5, 12);
    std::vector<Job> jobs(c.instance.jobs().begin(), c.instance.jobs().end());
    std::reverse(jobs.begin(), jobs.end());
    const Instance reversed(c.instance.horizon(), jobs);
    const auto a = aggregate(solve_flatten({c.instance, c.baseload}));
    const auto r = aggregate(solve_flatten({reversed, c.baseload}));
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], r[i], 1e-7) << "seed " << seed;
  }
}

TEST(SolveFlatten, SingleUnconstrainedJobFillsToTheWaterLevel) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SeededRng rng(seed + 3000);
    const std::size_t m = busched::testing::pick(rng, 2, 12);
    BaseloadSeries b;
    for (std::size_t i = 0; i < m; ++i) b.values.push_back(rng.uniform(0.0, 5.0));
    const double e = rng.uniform(0.0, 20.0);
    const Instance inst(horizon(m), {Job{"a", 0, m, e, 1e3}});
    const double lambda = detail::water_level(b.values, e);
    const auto s = aggregate(solve_flatten({inst, b}));
    for (std::size_t i = 0; i < m; ++i) {
      EXPECT_NEAR(s[i], std::max(0.0, lambda - b.values[i]), 1e-8);
    }
  }
}

TEST(SolveFlatten, NeverFlatterToChargeUncontrolled) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto c = busched::testing::random_case(seed + 1700, 5, 12);
    const double flat = site_F(solve_flatten({c.instance, c.baseload}), c.baseload);
    const double greedy = site_F(solve_uncontrolled(c.instance), c.baseload);
    EXPECT_LE(flat, greedy * (1.0 + 1e-12) + 1e-12);
  }
}

TEST(SolveFlatten, RejectsCapsBadBaseloadAndInfeasibleInstances) {
  const Instance capped(horizon(2), {Job{"a", 0, 2, 1.0, 1.0}}, std::vector<double>{1.0, 1.0});
  EXPECT_THROW(solve_flatten({capped, zeros(2)}), InvalidInput);
  const Instance inst(horizon(2), {Job{"a", 0, 2, 1.0, 1.0}});
  EXPECT_THROW(solve_flatten({inst, zeros(3)}), InvalidInput);
  const Instance too_much(horizon(2), {Job{"a", 0, 2, 5.0, 1.0}});
  EXPECT_THROW(solve_flatten({too_much, zeros(2)}), Infeasible);
}
