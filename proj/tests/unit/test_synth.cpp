#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "busched/feasibility.hpp"
#include "busched/synth.hpp"
#include "busched/week.hpp"

using namespace busched;

TEST(RandomBaseload, MeanPowerSitsMidRange) {
  const Horizon h = default_week_horizon();
  const auto b = random_baseload(h, 40.0, 400.0, 1);
  ASSERT_EQ(b.values.size(), 672u);
  const double mean_kw =
      std::accumulate(b.values.begin(), b.values.end(), 0.0) / 672.0 / h.interval_hours();
  EXPECT_GE(mean_kw, 200.0);
  EXPECT_LE(mean_kw, 240.0);
  for (double v : b.values) {
    EXPECT_GE(v, 40.0 * 0.25);
    EXPECT_LE(v, 400.0 * 0.25);
  }
}

TEST(RandomBaseload, NarrowRangeIsNearlyConstant) {
  const auto b = random_baseload(default_week_horizon(), 100.0, 100.0 + 1e-9, 3);
  for (double v : b.values) EXPECT_NEAR(v, 25.0, 1e-9);
  EXPECT_THROW(random_baseload(default_week_horizon(), 100.0, 100.0, 3), InvalidInput);
  EXPECT_THROW(random_baseload(default_week_horizon(), -1.0, 100.0, 3), InvalidInput);
}

TEST(RandomBaseload, SameSeedSameSeries) {
  const Horizon h = default_week_horizon();
  EXPECT_EQ(random_baseload(h, 40.0, 400.0, 9).values, random_baseload(h, 40.0, 400.0, 9).values);
  EXPECT_NE(random_baseload(h, 40.0, 400.0, 9).values, random_baseload(h, 40.0, 400.0, 10).values);
}

TEST(Emissions, SinusoidPeaksAtTheRequestedHour) {
  const Horizon h(*parse_timestamp("2023-06-05T00:00:00"), 96, 0.25);
  const auto e = sinusoidal_emissions(h);
  const auto peak = std::max_element(e.factors.begin(), e.factors.end()) - e.factors.begin();
  EXPECT_TRUE(peak == 0 || peak == 95);
  EXPECT_NEAR(std::accumulate(e.factors.begin(), e.factors.end(), 0.0) / 96.0, 250.0, 1e-9);
  EXPECT_THROW(sinusoidal_emissions(h, 50.0, 100.0), InvalidInput);
}

TEST(OfficeLoad, OpenOnWeekdayDaytimeOnly) {
  const Horizon h = default_week_horizon();
  const auto b = office_baseload(h);
  EXPECT_DOUBLE_EQ(b.values[0], 45.0 * 0.25);   // Monday 14:00
  EXPECT_DOUBLE_EQ(b.values[20], 15.0 * 0.25);  // Monday 19:00
  // Saturday 10:00 is 4 days 20 hours after the start.
  EXPECT_DOUBLE_EQ(b.values[(4 * 24 + 20) * 4], 15.0 * 0.25);
}

TEST(SynthTimetable, DefaultCountsAndIdenticalWeekdays) {
  const auto tt = synth_timetable(1);
  EXPECT_EQ(tt.lines_per_day(), (std::array<std::size_t, 7>{33, 33, 33, 33, 33, 22, 23}));
  EXPECT_TRUE(tt.weekdays_identical());
  for (const auto& e : tt.entries) {
    EXPECT_LT(e.start, e.end);
    EXPECT_GE(e.soc_after, 0.0);
    EXPECT_LE(e.soc_after, battery_capacity(e.bus_type));
  }
}

TEST(SynthTimetable, Deterministic) {
  const auto a = synth_timetable(4), b = synth_timetable(4);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t k = 0; k < a.entries.size(); ++k) {
    EXPECT_EQ(a.entries[k].start, b.entries[k].start);
    EXPECT_EQ(a.entries[k].end, b.entries[k].end);
    EXPECT_EQ(a.entries[k].soc_after, b.entries[k].soc_after);
    EXPECT_EQ(a.entries[k].bus_type, b.entries[k].bus_type);
  }
}

TEST(SynthTimetable, FullBatteriesNeedNoEnergy) {
  TimetableProfile profile;
  profile.soc_low = profile.soc_high = 1.0;
  const auto plan = build_week(synth_timetable(2, profile), default_week_horizon());
  ASSERT_FALSE(plan.jobs.empty());
  for (const Job& job : plan.jobs) EXPECT_EQ(job.energy, 0.0);
}

TEST(SynthTimetable, TwentySeedsAreFeasible) {
  const Horizon h = default_week_horizon();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto plan = build_week(synth_timetable(seed), h);
    EXPECT_TRUE(check_feasible(Instance(h, plan.jobs))) << "seed " << seed;
  }
}

TEST(SynthTimetable, ImpossibleProfilesAreRejected) {
  TimetableProfile bad_fraction;
  bad_fraction.large_fraction = 1.5;
  EXPECT_THROW(synth_timetable(1, bad_fraction), GenerationInfeasible);
  TimetableProfile bad_order;
  bad_order.start_latest = 16.0;
  EXPECT_THROW(synth_timetable(1, bad_order), GenerationInfeasible);
  TimetableProfile slow;
  slow.charge_rate_kw = 2.0;  // a day is too short to refill a large battery
  EXPECT_THROW(synth_timetable(1, slow), GenerationInfeasible);
}
