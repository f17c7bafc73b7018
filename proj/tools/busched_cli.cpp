// Command-line front end: runs the week scenarios, the flexibility
// experiment, or writes synthetic input files.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "busched/busched.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string timetable;
  std::string emissions;
  std::string baseload;
  std::vector<std::string> scenarios;
  std::optional<double> wc;
  std::string wf;
  std::string sweep;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<double> cap_kw;
};

std::vector<double> parse_sweep_list(const std::string& text) {
  if (text == "default") return busched::default_flatness_grid();
  std::vector<double> grid;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const std::string value(busched::detail::trim(item));
    grid.push_back(busched::detail::parse_number(value, 0, "--sweep"));
  }
  if (grid.empty()) throw busched::InvalidInput("--sweep needs at least one weight");
  return grid;
}

busched::RunConfig resolve(const Overrides& o, bool flexibility) {
  busched::RunConfig config =
      o.config.empty() ? busched::RunConfig{} : busched::load_config(o.config);
  if (!o.timetable.empty()) config.timetable_path = o.timetable;
  if (!o.emissions.empty()) config.emissions_path = o.emissions;
  if (!o.baseload.empty()) config.baseload_path = o.baseload;
  if (!o.scenarios.empty()) config.scenarios = o.scenarios;
  if (o.wc) config.weights.carbon = *o.wc;
  if (!o.wf.empty()) config.weights.flatness = busched::detail::parse_number(o.wf, 0, "--wf");
  if (!o.sweep.empty()) {
    if (o.sweep == "off") {
      config.sweep = false;
    } else {
      config.sweep = true;
      config.sweep_grid = parse_sweep_list(o.sweep);
    }
  }
  if (o.seed) {
    config.timetable_seed = *o.seed;
    if (flexibility) config.flex_seed = *o.seed;
  }
  if (!o.out_dir.empty()) config.out_dir = o.out_dir;
  if (o.cap_kw) config.cap_kw = *o.cap_kw;
  return config;
}

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON run configuration");
  app->add_option("--timetable", o.timetable, "timetable CSV (default: synthetic)");
  app->add_option("--emissions", o.emissions, "emission factor CSV (default: day-night curve)");
  app->add_option("--baseload", o.baseload, "site baseload CSV (default: office profile)");
  app->add_option("--seed", o.seed, "seed of the synthetic timetable (and flexibility baseload)");
  app->add_option("--out-dir", o.out_dir, "output directory");
}

void print_written(const std::vector<std::string>& files) {
  for (const auto& f : files) std::cout << "wrote " << f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Charging schedules for an electric bus depot"};
  app.require_subcommand(1);

  Overrides week;
  auto* week_cmd = app.add_subcommand("week", "run the weekly scenarios and the weight sweep");
  add_common(week_cmd, week);
  week_cmd->add_option("--scenario", week.scenarios,
                       "scenario to run (repeatable): uncontrolled, co2, flatten, weighted");
  week_cmd->add_option("--wc", week.wc, "carbon weight of the weighted scenario");
  week_cmd->add_option("--wf", week.wf, "flatness weight of the weighted scenario (inf allowed)");
  week_cmd->add_option("--sweep", week.sweep, "'default', 'off' or a comma-separated w_f list");
  week_cmd->add_option("--cap-kw", week.cap_kw, "global grid cap in kW (co2 scenario only)");

  Overrides flex;
  auto* flex_cmd = app.add_subcommand("flexibility", "run the flexibility experiment");
  add_common(flex_cmd, flex);

  std::uint64_t synth_seed = 1;
  std::string synth_dir = "synthetic";
  double low_kw = 40.0;
  double high_kw = 400.0;
  auto* synth_cmd = app.add_subcommand("synth", "write synthetic timetable, emission and baseload CSVs");
  synth_cmd->add_option("--seed", synth_seed, "generator seed");
  synth_cmd->add_option("--out-dir", synth_dir, "output directory");
  synth_cmd->add_option("--low-kw", low_kw, "lower bound of the random baseload");
  synth_cmd->add_option("--high-kw", high_kw, "upper bound of the random baseload");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*week_cmd) {
      const auto config = resolve(week, false);
      const auto result = busched::run_week(config);
      for (const auto& s : result.scenarios) {
        std::cout << s.label << ": F=" << busched::detail::format_number(s.report.F)
                  << " C=" << busched::detail::format_number(s.report.C)
                  << " P=" << busched::detail::format_fixed(s.report.P) << " kW\n";
      }
      print_written(busched::write_week_outputs(result, config.out_dir));
    } else if (*flex_cmd) {
      const auto config = resolve(flex, true);
      const auto result = busched::run_flexibility(config);
      std::cout << "baseload peak " << busched::detail::format_fixed(result.baseload_peak)
                << " kW, bus-only peak " << busched::detail::format_fixed(result.bus_only_peak)
                << " kW, coordinated peak " << busched::detail::format_fixed(result.coordinated_peak)
                << " kW, gain " << busched::detail::format_fixed(100.0 * result.gain.gain) << "%\n";
      print_written(busched::write_flexibility_outputs(result, config.out_dir));
    } else if (*synth_cmd) {
      const auto horizon = busched::default_week_horizon();
      std::filesystem::create_directories(synth_dir);
      const std::filesystem::path dir(synth_dir);
      const busched::RunConfig defaults;
      std::vector<std::string> files{(dir / "timetable.csv").string(), (dir / "emissions.csv").string(),
                                     (dir / "baseload.csv").string(),
                                     (dir / "random_baseload.csv").string()};
      busched::write_timetable(files[0], busched::synth_timetable(synth_seed));
      busched::write_emissions(files[1], horizon,
                               busched::sinusoidal_emissions(horizon, defaults.emission_mean,
                                                             defaults.emission_amplitude,
                                                             defaults.emission_peak_hour));
      busched::write_baseload(files[2], horizon, busched::office_baseload(horizon));
      busched::write_baseload(files[3], horizon,
                              busched::random_baseload(horizon, low_kw, high_kw, synth_seed));
      print_written(files);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
