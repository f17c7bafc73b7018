#include <gtest/gtest.h>

#include <algorithm>
#include <utility>
#include <vector>

#include "busched/feasibility.hpp"
#include "busched/model.hpp"
#include "busched/synth.hpp"
#include "oracle/oracle.hpp"
#include "support/random_instances.hpp"

using namespace busched;

namespace {

Horizon horizon(std::size_t m) { return Horizon(Timestamp{}, m); }

Job job(std::size_t a, std::size_t d, double e, double rate, std::string id = "j") {
  return Job{std::move(id), a, d, e, rate};
}

}  // namespace

TEST(Horizon, IntervalsAreContiguous) {
  const Horizon h(*parse_timestamp("2023-06-05T14:00:00"), 672);
  EXPECT_EQ(h.size(), 672u);
  EXPECT_DOUBLE_EQ(h.interval_hours(), 0.25);
  EXPECT_EQ(format_timestamp(h.interval_start(4)), "2023-06-05T15:00:00");
  EXPECT_EQ(format_timestamp(h.end()), "2023-06-12T14:00:00");
}

TEST(Horizon, BoundaryRoundingIsInwardAndClamped) {
  const Horizon h(*parse_timestamp("2023-06-05T14:00:00"), 8);
  const auto t = *parse_timestamp("2023-06-05T14:20:00");
  EXPECT_EQ(h.boundary_ceil(t), 2u);
  EXPECT_EQ(h.boundary_floor(t), 1u);
  EXPECT_EQ(h.boundary_ceil(*parse_timestamp("2023-06-05T10:00:00")), 0u);
  EXPECT_EQ(h.boundary_floor(*parse_timestamp("2023-06-06T10:00:00")), 8u);
}

TEST(Horizon, RejectsInvalidShapes) {
  EXPECT_THROW(Horizon(Timestamp{}, 0), InvalidInput);
  EXPECT_THROW(Horizon(Timestamp{}, 4, 0.0), InvalidInput);
  EXPECT_THROW(Horizon(Timestamp{}, 4, -1.0), InvalidInput);
}

TEST(Instance, ValidatesWindowsEnergiesAndCaps) {
  EXPECT_THROW(Instance(horizon(4), {job(2, 2, 1.0, 1.0)}), InvalidInput);
  EXPECT_THROW(Instance(horizon(4), {job(1, 5, 1.0, 1.0)}), InvalidInput);
  EXPECT_THROW(Instance(horizon(4), {job(0, 2, -1.0, 1.0)}), InvalidInput);
  EXPECT_THROW(Instance(horizon(4), {job(0, 2, 1.0, 0.0)}), InvalidInput);
  EXPECT_THROW(Instance(horizon(4), {job(0, 2, 1.0, 1.0)}, std::vector<double>{1.0}), InvalidInput);
  EXPECT_THROW(Instance(horizon(2), {job(0, 2, 1.0, 1.0)}, std::vector<double>{1.0, -1.0}),
               InvalidInput);
  const Instance ok(horizon(4), {job(0, 2, 1.0, 1.0), job(1, 4, 2.0, 1.0)});
  EXPECT_DOUBLE_EQ(ok.total_energy(), 3.0);
}

TEST(Availability, HalfOpenWindow) {
  const Instance inst(horizon(6), {job(2, 5, 1.0, 1.0)});
  const auto av = availability(inst);
  EXPECT_EQ(av.intervals_of[0], (std::vector<std::size_t>{2, 3, 4}));
}

TEST(Availability, EmptyJobList) {
  const Instance inst(horizon(5), {});
  const auto av = availability(inst);
  ASSERT_EQ(av.jobs_at.size(), 5u);
  for (const auto& set : av.jobs_at) EXPECT_TRUE(set.empty());
}

TEST(Availability, OverlappingWindows) {
  const Instance inst(horizon(4), {job(0, 3, 1.0, 1.0), job(2, 4, 1.0, 1.0)});
  const auto av = availability(inst);
  EXPECT_EQ(av.jobs_at[2], (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(av.jobs_at[3], (std::vector<std::size_t>{1}));
}

TEST(Availability, IsAnExactTransposePair) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto c = busched::testing::random_case(seed, 6, 12);
    const auto av = availability(c.instance);
    for (std::size_t i = 0; i < c.instance.interval_count(); ++i) {
      for (std::size_t j = 0; j < c.instance.job_count(); ++j) {
        const bool forward = std::count(av.jobs_at[i].begin(), av.jobs_at[i].end(), j) == 1;
        const bool back = std::count(av.intervals_of[j].begin(), av.intervals_of[j].end(), i) == 1;
        EXPECT_EQ(forward, back);
        EXPECT_EQ(forward, c.instance.job(j).available(i));
      }
    }
  }
}

TEST(CheckFeasible, ExactlyTightSingleJob) {
  const Instance inst(horizon(1), {job(0, 1, 7.5, 7.5)});
  EXPECT_TRUE(check_feasible(inst));
}

TEST(CheckFeasible, CapBindsAndBothJobsAreInTheCut) {
  const Instance inst(horizon(1), {job(0, 1, 7.5, 7.5, "a"), job(0, 1, 7.5, 7.5, "b")},
                      std::vector<double>{7.5});
  const auto verdict = check_feasible(inst);
  EXPECT_FALSE(verdict);
  EXPECT_EQ(verdict.violating_jobs, (std::vector<std::size_t>{0, 1}));
  EXPECT_NEAR(verdict.deliverable, 7.5, 1e-9);
  EXPECT_NEAR(verdict.required, 15.0, 1e-9);
}

TEST(CheckFeasible, WindowTooShortForEnergy) {
  const Instance inst(horizon(4), {job(0, 2, 10.0, 4.0, "short"), job(2, 4, 1.0, 4.0, "fine")});
  const auto verdict = check_feasible(inst);
  EXPECT_FALSE(verdict);
  EXPECT_EQ(verdict.violating_jobs, (std::vector<std::size_t>{0}));
}

TEST(CheckFeasible, GenerateThenCheck) {
  // Instances built from a sampled schedule are feasible by construction.
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SeededRng rng(seed + 1000);
    const std::size_t m = busched::testing::pick(rng, 1, 12);
    const std::size_t n = busched::testing::pick(rng, 1, 6);
    std::vector<Job> jobs;
    std::vector<double> load(m, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      Job jb;
      jb.arrival = busched::testing::pick(rng, 0, m - 1);
      jb.departure = busched::testing::pick(rng, jb.arrival + 1, m);
      jb.max_rate = rng.uniform(0.5, 8.0);
      for (std::size_t i = jb.arrival; i < jb.departure; ++i) {
        const double e = rng.uniform() * jb.max_rate;
        jb.energy += e;
        load[i] += e;
      }
      jobs.push_back(jb);
    }
    // Caps at the sampled load (plus slack) keep the sampled schedule admissible.
    std::vector<double> caps(load);
    for (double& g : caps) g += 1e-6;
    const Instance inst(horizon(m), jobs, caps);
    EXPECT_TRUE(check_feasible(inst)) << "seed " << seed;
  }
}

TEST(CheckFeasible, AgreesWithLpOracle) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    SeededRng rng(seed + 5000);
    const std::size_t m = busched::testing::pick(rng, 1, 8);
    const std::size_t n = busched::testing::pick(rng, 1, 4);
    std::vector<Job> jobs;
    for (std::size_t j = 0; j < n; ++j) {
      Job jb;
      jb.arrival = busched::testing::pick(rng, 0, m - 1);
      jb.departure = busched::testing::pick(rng, jb.arrival + 1, m);
      jb.max_rate = busched::testing::on_grid(rng.uniform(0.5, 5.0), 0.01);
      jb.energy = busched::testing::on_grid(rng.uniform(0.0, 1.3) * jb.max_rate * jb.window(), 0.01);
      jobs.push_back(jb);
    }
    std::optional<std::vector<double>> caps;
    if (rng.uniform() < 0.5) {
      caps.emplace();
      for (std::size_t i = 0; i < m; ++i) caps->push_back(busched::testing::on_grid(rng.uniform(0.0, 8.0), 0.01));
    }
    const Instance inst(horizon(m), jobs, caps);
    EXPECT_EQ(static_cast<bool>(check_feasible(inst)), oracle::lp_feasible(inst)) << "seed " << seed;
  }
}

TEST(Aggregate, SingleAllocation) {
  const Instance inst(horizon(6), {job(0, 6, 5.0, 5.0)});
  Schedule s(inst);
  s.at(0, 3) = 5.0;
  EXPECT_EQ(aggregate(s), (std::vector<double>{0, 0, 0, 5, 0, 0}));
}

TEST(Aggregate, TwoJobsShareAnInterval) {
  const Instance inst(horizon(2), {job(0, 2, 2.0, 2.0), job(0, 1, 2.0, 2.0)});
  Schedule s(inst);
  s.at(0, 0) = 2.0;
  s.at(1, 0) = 2.0;
  EXPECT_DOUBLE_EQ(aggregate(s)[0], 4.0);
}

TEST(Aggregate, MatchesDenseDoubleLoop) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto c = busched::testing::random_case(seed, 6, 12);
    const std::size_t n = c.instance.job_count(), m = c.instance.interval_count();
    Schedule s(c.instance);
    std::vector<std::vector<double>> dense(n, std::vector<double>(m, 0.0));
    SeededRng rng(seed + 77);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = c.instance.job(j).arrival; i < c.instance.job(j).departure; ++i) {
        if (rng.uniform() < 0.5) continue;
        dense[j][i] = rng.uniform(0.0, 3.0);
        s.at(j, i) = dense[j][i];
      }
    }
    const auto agg = aggregate(s);
    for (std::size_t i = 0; i < m; ++i) {
      double total = 0.0;
      for (std::size_t j = 0; j < n; ++j) total += dense[j][i];
      EXPECT_EQ(agg[i], total);
    }
  }
}

TEST(Schedule, AllocationsOnlyInsideTheWindow) {
  const Instance inst(horizon(6), {job(2, 4, 1.0, 1.0)});
  Schedule s(inst);
  EXPECT_THROW(s.at(0, 1) = 1.0, InvalidInput);
  EXPECT_THROW(s.at(0, 4) = 1.0, InvalidInput);
  EXPECT_EQ(std::as_const(s).at(0, 5), 0.0);
  EXPECT_EQ(s.row(0).size(), 2u);
}

TEST(FindViolation, ReportsEachConstraintFamily) {
  const Instance inst(horizon(3), {job(0, 3, 3.0, 1.5)}, std::vector<double>{2.0, 2.0, 2.0});
  Schedule s(inst);
  EXPECT_TRUE(find_violation(inst, s));  // under-delivery
  s.at(0, 0) = 1.5;
  s.at(0, 1) = 1.5;
  EXPECT_FALSE(find_violation(inst, s));
  s.at(0, 1) = -0.5;
  s.at(0, 2) = 2.0;
  EXPECT_TRUE(find_violation(inst, s));  // negative and above rate
  s.at(0, 1) = 1.5;
  s.at(0, 2) = 0.0;
  const Instance tight(horizon(3), {job(0, 3, 3.0, 1.5)}, std::vector<double>{1.0, 2.0, 2.0});
  EXPECT_TRUE(find_violation(tight, s));  // cap
  EXPECT_FALSE(find_violation(tight, s, 1e-6, false));
}
