#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dfcv/config.hpp"
#include "dfcv/engine.hpp"
#include "dfcv/log.hpp"
#include "dfcv/report_io.hpp"
#include "dfcv/trace.hpp"

namespace {

using namespace dfcv;

SimConfig config_from_file_or_defaults(const std::string& path) {
  return path.empty() ? SimConfig{} : load_config(path);
}

void require_valid(const SimConfig& config) {
  std::vector<std::string> problems = validate_config(config);
  if (problems.empty()) return;
  std::ostringstream msg;
  msg << "invalid config:";
  for (const std::string& p : problems) msg << "\n  " << p;
  throw std::invalid_argument(msg.str());
}

int run_command(const std::string& config_path,
                std::optional<std::uint64_t> seed,
                const std::string& trace_path, const std::string& out_dir) {
  SimConfig config = config_from_file_or_defaults(config_path);
  if (seed.has_value()) config.seed = *seed;
  require_valid(config);

  std::optional<TraceTimeline> trace;
  if (!trace_path.empty()) {
    trace = load_trace(trace_path, config.road_length_m, config.lane_count);
  }

  std::filesystem::create_directories(out_dir + "/plotdata");
  log_info("run: protocol=" + to_string(config.protocol) +
           " scenario=" + to_string(config.scenario) +
           " vehicles=" + std::to_string(config.vehicle_count) +
           " seed=" + std::to_string(config.seed));

  RunResult result = run(config, trace.has_value() ? &*trace : nullptr);

  write_report_csv(out_dir + "/report.csv", {&result.report, 1});
  write_events_csv(out_dir + "/events.csv", result.log.events);
  write_plotdata(out_dir + "/plotdata", {&result.report, 1});
  write_failure_curve_csv(out_dir + "/plotdata/failure_probability_curve.csv",
                          result.report);
  log_info("run: wrote " + out_dir + "/report.csv");
  return 0;
}

/// Shared by sweep and compare: the full (vehicle_count, protocol, seed)
/// grid, executed cell by cell (optionally across OpenMP threads), rows
/// emitted in sorted order regardless of completion order.
int grid_command(const SimConfig& base, std::vector<int> vehicle_counts,
                 std::vector<Protocol> protocols, int seeds_per_cell,
                 int jobs, const std::string& out_dir) {
  std::sort(vehicle_counts.begin(), vehicle_counts.end());
  vehicle_counts.erase(
      std::unique(vehicle_counts.begin(), vehicle_counts.end()),
      vehicle_counts.end());
  std::sort(protocols.begin(), protocols.end(),
            [](Protocol a, Protocol b) { return to_string(a) < to_string(b); });
  protocols.erase(std::unique(protocols.begin(), protocols.end()),
                  protocols.end());

  std::vector<SimConfig> cells;
  for (int count : vehicle_counts) {
    for (Protocol protocol : protocols) {
      for (int s = 0; s < seeds_per_cell; ++s) {
        SimConfig c = base;
        c.vehicle_count = count;
        c.protocol = protocol;
        c.seed = base.seed + static_cast<std::uint64_t>(s);
        require_valid(c);
        cells.push_back(c);
      }
    }
  }

  std::vector<RunReport> reports(cells.size());
  std::vector<std::string> errors(cells.size());
  bool invariant_failure = false;
  const std::int64_t total = static_cast<std::int64_t>(cells.size());
#pragma omp parallel for schedule(dynamic) num_threads(jobs) if (jobs > 1)
  for (std::int64_t i = 0; i < total; ++i) {
    const std::size_t idx = static_cast<std::size_t>(i);
    try {
      reports[idx] = run(cells[idx]).report;
    } catch (const InvariantViolation& e) {
      errors[idx] = e.what();
#pragma omp critical
      invariant_failure = true;
    } catch (const std::exception& e) {
      errors[idx] = e.what();
    }
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!errors[i].empty()) {
      std::ostringstream msg;
      msg << "cell (vehicles=" << cells[i].vehicle_count
          << " protocol=" << to_string(cells[i].protocol)
          << " seed=" << cells[i].seed << ") failed: " << errors[i];
      if (invariant_failure) throw InvariantViolation(msg.str());
      throw std::runtime_error(msg.str());
    }
  }

  std::filesystem::create_directories(out_dir + "/plotdata");
  write_report_csv(out_dir + "/report.csv", reports);
  write_plotdata(out_dir + "/plotdata", reports);
  log_info("wrote " + std::to_string(reports.size()) + " rows to " +
           out_dir + "/report.csv");
  return 0;
}

std::vector<Protocol> parse_protocols(const std::vector<std::string>& names) {
  std::vector<Protocol> out;
  for (const std::string& name : names) {
    out.push_back(protocol_from_string(name));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vehicular fog simulator: dynamic fog orchestration with "
               "static-fog and cloud-only baselines"};
  app.require_subcommand(1);

  std::string config_path;
  std::string trace_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::vector<int> vehicle_counts = {40, 80, 120, 160, 200, 240};
  std::vector<std::string> protocol_names;
  int seeds_per_cell = 5;
  int jobs = 1;

  CLI::App* run_cmd = app.add_subcommand("run", "Single simulation run");
  run_cmd->add_option("--config", config_path, "JSON config file")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed, "Override the config seed");
  run_cmd->add_option("--trace", trace_path, "Mobility trace CSV")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "Output directory");

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Vehicle-density sweep across seeds");
  sweep_cmd->add_option("--config", config_path, "JSON config file")
      ->check(CLI::ExistingFile);
  sweep_cmd
      ->add_option("--vehicle-counts", vehicle_counts,
                   "Vehicle counts to sweep")
      ->delimiter(',');
  sweep_cmd->add_option("--protocols", protocol_names,
                        "Protocols to sweep (default: the config's)")
      ->delimiter(',');
  sweep_cmd->add_option("--seeds", seeds_per_cell, "Seeds per cell")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--jobs", jobs, "Concurrent runs")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", out_dir, "Output directory");

  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "Paired protocol comparison at one vehicle count");
  compare_cmd->add_option("--config", config_path, "JSON config file")
      ->check(CLI::ExistingFile);
  compare_cmd
      ->add_option("--protocols", protocol_names,
                   "Protocols to compare (default: all three)")
      ->delimiter(',');
  compare_cmd->add_option("--seeds", seeds_per_cell, "Seeds per protocol")
      ->check(CLI::PositiveNumber);
  compare_cmd->add_option("--jobs", jobs, "Concurrent runs")
      ->check(CLI::PositiveNumber);
  compare_cmd->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) {
      return run_command(config_path, seed, trace_path, out_dir);
    }
    if (sweep_cmd->parsed()) {
      SimConfig base = config_from_file_or_defaults(config_path);
      std::vector<Protocol> protocols =
          protocol_names.empty() ? std::vector<Protocol>{base.protocol}
                                 : parse_protocols(protocol_names);
      return grid_command(base, vehicle_counts, protocols, seeds_per_cell,
                          jobs, out_dir);
    }
    if (compare_cmd->parsed()) {
      SimConfig base = config_from_file_or_defaults(config_path);
      std::vector<Protocol> protocols =
          protocol_names.empty()
              ? std::vector<Protocol>{Protocol::dfcv, Protocol::static_fog,
                                      Protocol::cloud_only}
              : parse_protocols(protocol_names);
      return grid_command(base, {base.vehicle_count}, protocols,
                          seeds_per_cell, jobs, out_dir);
    }
  } catch (const dfcv::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
