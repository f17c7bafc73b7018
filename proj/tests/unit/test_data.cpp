#include <gtest/gtest.h>

#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "busched/data.hpp"
#include "busched/synth.hpp"

using namespace busched;

namespace {

Horizon quarter_hours(const char* start, std::size_t m) {
  return Horizon(*parse_timestamp(start), m, 0.25);
}

}  // namespace

TEST(Emissions, HourlyRowsAreReplicatedOntoQuarterHours) {
  std::istringstream in(
      "timestamp,co2_kg_per_kwh\n"
      "2023-06-05T00:00:00,0.4\n"
      "2023-06-05T01:00:00,0.2\n");
  const auto e = parse_emissions(in, quarter_hours("2023-06-05T00:00", 8));
  EXPECT_EQ(e.factors, (std::vector<double>{0.4, 0.4, 0.4, 0.4, 0.2, 0.2, 0.2, 0.2}));
}

TEST(Emissions, QuarterHourRowsPassThroughAndFineRowsAverage) {
  std::istringstream in(
      "timestamp,co2_kg_per_kwh\n"
      "2023-06-05T00:00,0.1\n2023-06-05T00:15,0.2\n2023-06-05T00:30,0.3\n");
  EXPECT_EQ(parse_emissions(in, quarter_hours("2023-06-05T00:00", 3)).factors,
            (std::vector<double>{0.1, 0.2, 0.3}));
  std::istringstream fine(
      "timestamp,co2_kg_per_kwh\n"
      "2023-06-05T00:00,0.1\n2023-06-05T00:05,0.2\n2023-06-05T00:10,0.3\n");
  EXPECT_NEAR(parse_emissions(fine, quarter_hours("2023-06-05T00:00", 1)).factors[0], 0.2, 1e-15);
}

TEST(Emissions, MissingHourIsACoverageGap) {
  std::istringstream in(
      "timestamp,co2_kg_per_kwh\n"
      "2023-06-05T00:00,0.4\n2023-06-05T01:00,0.3\n2023-06-05T03:00,0.2\n");
  try {
    parse_emissions(in, quarter_hours("2023-06-05T00:00", 16));
    FAIL() << "expected a coverage gap";
  } catch (const CoverageGap& e) {
    EXPECT_NE(std::string(e.what()).find("2023-06-05T02:00:00"), std::string::npos);
  }
  std::istringstream early("timestamp,co2_kg_per_kwh\n2023-06-05T01:00,0.4\n2023-06-05T02:00,0.4\n");
  EXPECT_THROW(parse_emissions(early, quarter_hours("2023-06-05T00:00", 4)), CoverageGap);
}

TEST(Emissions, RejectsSchemaViolations) {
  std::istringstream header("time,co2\n2023-06-05T00:00,0.4\n");
  EXPECT_THROW(parse_emissions(header, quarter_hours("2023-06-05T00:00", 4)), SchemaError);
  std::istringstream negative("timestamp,co2_kg_per_kwh\n2023-06-05T00:00,-0.4\n");
  EXPECT_THROW(parse_emissions(negative, quarter_hours("2023-06-05T00:00", 1)), SchemaError);
  std::istringstream order(
      "timestamp,co2_kg_per_kwh\n2023-06-05T01:00,0.4\n2023-06-05T00:00,0.4\n");
  EXPECT_THROW(parse_emissions(order, quarter_hours("2023-06-05T00:00", 1)), SchemaError);
  std::istringstream text("timestamp,co2_kg_per_kwh\n2023-06-05T00:00,high\n");
  try {
    parse_emissions(text, quarter_hours("2023-06-05T00:00", 1));
    FAIL() << "expected a schema error";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.column(), "co2_kg_per_kwh");
  }
}

TEST(Csv, WrongFieldCountReportsTheRow) {
  std::istringstream in(
      "timestamp,co2_kg_per_kwh\n2023-06-05T00:00,0.4\n2023-06-05T00:15,0.4,9\n");
  try {
    parse_emissions(in, quarter_hours("2023-06-05T00:00", 1));
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
  }
}

TEST(Baseload, EnergyIsConservedWhenSplitting) {
  std::istringstream in(
      "timestamp,baseload_kwh\n2023-06-05T00:00,40\n2023-06-05T01:00,20\n");
  const auto b = parse_baseload(in, quarter_hours("2023-06-05T00:00", 8));
  EXPECT_DOUBLE_EQ(std::accumulate(b.values.begin(), b.values.end(), 0.0), 60.0);
  EXPECT_DOUBLE_EQ(b.values[0], 10.0);
  EXPECT_DOUBLE_EQ(b.values[7], 5.0);
}

TEST(Series, WriteThenParseRoundTrips) {
  const Horizon h = quarter_hours("2023-06-05T14:00", 96);
  const auto co2 = sinusoidal_emissions(h);
  std::stringstream buf;
  write_series(buf, h, "co2_kg_per_kwh", co2.factors);
  EXPECT_EQ(parse_emissions(buf, h).factors, co2.factors);
}

TEST(Timetable, RejectsUnknownBusTypeAndOtherViolations) {
  const std::string header = "day,line_id,start,end,bus_type,soc_after_kwh\n";
  auto parse = [&](const std::string& row) {
    std::istringstream in(header + row);
    return parse_timetable(in);
  };
  try {
    parse("MON,L1,06:00,18:00,MEDIUM,10\n");
    FAIL() << "expected a schema error";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.column(), "bus_type");
    EXPECT_EQ(e.row(), 2u);
  }
  EXPECT_THROW(parse("FUNDAY,L1,06:00,18:00,SMALL,10\n"), SchemaError);
  EXPECT_THROW(parse("MON,,06:00,18:00,SMALL,10\n"), SchemaError);
  EXPECT_THROW(parse("MON,L1,06:00,18:00,SMALL,10\nMON,L1,07:00,19:00,SMALL,10\n"), SchemaError);
  EXPECT_THROW(parse("MON,L1,6am,18:00,SMALL,10\n"), SchemaError);
  EXPECT_THROW(parse("MON,L1,18:00,06:00,SMALL,10\n"), SchemaError);
  EXPECT_THROW(parse("MON,L1,06:00,18:00,SMALL,130\n"), SchemaError);
  const auto ok = parse("MON,L1,06:00,25:30,LARGE,130\n");
  ASSERT_EQ(ok.entries.size(), 1u);
  EXPECT_EQ(ok.entries[0].end, Seconds{25 * 3600 + 1800});
}

TEST(Timetable, RoundTripKeepsTheWeeklyCounts) {
  const auto tt = synth_timetable(1);
  std::stringstream buf;
  write_timetable(buf, tt);
  const auto back = parse_timetable(buf);
  EXPECT_EQ(back.lines_per_day(), (std::array<std::size_t, 7>{33, 33, 33, 33, 33, 22, 23}));
  EXPECT_TRUE(back.weekdays_identical());
  ASSERT_EQ(back.entries.size(), tt.entries.size());
  for (std::size_t k = 0; k < tt.entries.size(); ++k) {
    EXPECT_EQ(back.entries[k].line_id, tt.entries[k].line_id);
    EXPECT_EQ(back.entries[k].start, tt.entries[k].start);
    EXPECT_EQ(back.entries[k].end, tt.entries[k].end);
    EXPECT_EQ(back.entries[k].soc_after, tt.entries[k].soc_after);
  }
}

TEST(Report, RoundTripsWithReductions) {
  const std::vector<ScenarioReport> reports{{"uncontrolled", 200.0, 10.0, 40.0},
                                            {"flatten", 100.0, 9.5, 20.0}};
  std::stringstream buf;
  write_report(buf, reports);
  const std::string text = buf.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "scenario,F,C,P,F_reduction_pct,C_reduction_pct,P_reduction_pct");
  EXPECT_NE(text.find("flatten,100,9.5,20,50,5"), std::string::npos);
  const auto back = parse_report(buf);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].label, "flatten");
  EXPECT_EQ(back[1].F, 100.0);
  EXPECT_EQ(back[1].C, 9.5);
  EXPECT_EQ(back[1].P, 20.0);
}

TEST(Sweep, InfiniteWeightRoundTrips) {
  const std::vector<SweepPoint> points{{0.0, 300.0, 10.0, 5e5}, {0.1, 250.5, 11.0, 4e5},
                                       {std::numeric_limits<double>::infinity(), 200.0, 12.0, 3e5}};
  std::stringstream buf;
  write_sweep(buf, points);
  EXPECT_NE(buf.str().find("\ninf,"), std::string::npos);
  const auto back = parse_sweep(buf);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_TRUE(std::isinf(back[2].w_f));
  EXPECT_EQ(back[1].w_f, 0.1);
  EXPECT_EQ(back[1].P, 250.5);
}

TEST(Files, MissingInputIsReported) {
  EXPECT_THROW(load_timetable("/nonexistent/timetable.csv"), std::runtime_error);
}
