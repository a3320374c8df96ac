#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "dfcv/report_io.hpp"

using namespace dfcv;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::filesystem::path temp_dir(const std::string& tag) {
  const auto dir =
      std::filesystem::temp_directory_path() / ("dfcv_report_io_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

RunReport sample_report() {
  RunReport r;
  r.protocol = Protocol::dfcv;
  r.scenario = Scenario::urban;
  r.vehicle_count = 40;
  r.seed = 7;
  r.mean_delay_s = 0.006072;
  r.median_delay_s = 0.006072;
  r.p95_delay_s = 0.008072;
  r.has_delay_stats = true;
  r.delivery_probability = 0.95;
  r.has_delivery_probability = true;
  r.collision_ratio = 0.25;
  r.has_collision_ratio = true;
  r.split_count = 3;
  r.merge_count = 2;
  r.destroy_count = 1;
  return r;
}

}  // namespace

TEST_CASE("format_double emits round-trippable short decimals") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.006072) == "0.006072");
  CHECK(format_double(0.95) == "0.95");
  CHECK(format_double(1.0 / 3.0) == "0.333333333");
  // Value survives a parse round trip at the printed precision.
  const double v = 0.1234567891234;
  const double parsed = std::stod(format_double(v));
  CHECK(parsed == doctest::Approx(v).epsilon(1e-9));
}

TEST_CASE("report csv has the fixed header and one row per run") {
  const auto dir = temp_dir("report");
  const auto path = dir / "report.csv";
  RunReport a = sample_report();
  RunReport b = sample_report();
  b.protocol = Protocol::cloud_only;
  b.seed = 8;
  const std::vector<RunReport> reports = {a, b};
  write_report_csv(path.string(), reports);

  const auto lines = lines_of(slurp(path));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] ==
        "protocol,scenario,vehicle_count,seed,mean_delay_s,median_delay_s,"
        "p95_delay_s,delivery_probability,collision_ratio,split_count,"
        "merge_count,destroy_count");
  CHECK(lines[1] ==
        "dfcv,urban,40,7,0.006072,0.006072,0.008072,0.95,0.25,3,2,1");
  CHECK(lines[2].rfind("cloud-only,urban,40,8,", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("undefined metrics write empty csv fields") {
  const auto dir = temp_dir("undef");
  const auto path = dir / "report.csv";
  RunReport r = sample_report();
  r.has_delay_stats = false;
  r.has_delivery_probability = false;
  r.has_collision_ratio = false;
  const std::vector<RunReport> reports = {r};
  write_report_csv(path.string(), reports);

  const auto lines = lines_of(slurp(path));
  REQUIRE(lines.size() == 2);
  CHECK(lines[1] == "dfcv,urban,40,7,,,,,,3,2,1");
  std::filesystem::remove_all(dir);
}

TEST_CASE("events csv uses upper-case kinds and comma-free details") {
  const auto dir = temp_dir("events");
  const auto path = dir / "events.csv";
  EventLog events;
  events.push_back({0.1, EventKind::split,
                    "fog=0 reason=distance children=1;2 members=0;1;2;3"});
  events.push_back({0.2, EventKind::merge, "fogs=1;2 into=3"});
  events.push_back({0.3, EventKind::destroy, "fog=3"});
  events.push_back({0.4, EventKind::warn, "single-member fog split skipped"});
  write_events_csv(path.string(), events);

  const auto lines = lines_of(slurp(path));
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "time_s,kind,detail");
  CHECK(lines[1] ==
        "0.1,SPLIT,fog=0 reason=distance children=1;2 members=0;1;2;3");
  CHECK(lines[2] == "0.2,MERGE,fogs=1;2 into=3");
  CHECK(lines[3] == "0.3,DESTROY,fog=3");
  CHECK(lines[4] == "0.4,WARN,single-member fog split skipped");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    // Exactly two commas per row: the detail never smuggles one in.
    CHECK(std::count(lines[i].begin(), lines[i].end(), ',') == 2);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("plotdata aggregates seeds into mean and population stddev") {
  const auto dir = temp_dir("plotdata");
  RunReport a = sample_report();
  a.mean_delay_s = 0.010;
  a.delivery_probability = 0.9;
  a.collision_ratio = 0.2;
  RunReport b = sample_report();
  b.seed = 8;
  b.mean_delay_s = 0.030;
  b.delivery_probability = 0.8;
  b.collision_ratio = 0.4;
  RunReport c = sample_report();  // different cell: another protocol
  c.protocol = Protocol::cloud_only;
  c.mean_delay_s = 0.056072;
  const std::vector<RunReport> reports = {a, b, c};
  write_plotdata(dir.string(), reports);

  const auto delay = lines_of(slurp(dir / "delay_vs_vehicles.csv"));
  REQUIRE(delay.size() == 3);
  CHECK(delay[0] == "vehicle_count,protocol,mean,stddev_over_seeds");
  // Rows sorted by vehicle count, then protocol name.
  CHECK(delay[1] == "40,cloud-only,0.056072,0");
  // mean of {0.010, 0.030} = 0.02, population stddev = 0.01
  CHECK(delay[2] == "40,dfcv,0.02,0.01");

  const auto delivery = lines_of(slurp(dir / "delivery_vs_vehicles.csv"));
  REQUIRE(delivery.size() == 3);
  CHECK(delivery[2] == "40,dfcv,0.85,0.05");

  const auto collision = lines_of(slurp(dir / "collision_vs_vehicles.csv"));
  REQUIRE(collision.size() == 3);
  CHECK(collision[2] == "40,dfcv,0.3,0.1");
  std::filesystem::remove_all(dir);
}

TEST_CASE("plotdata keeps rows for cells that never defined a metric") {
  const auto dir = temp_dir("plotdata_undef");
  RunReport r = sample_report();
  r.has_delay_stats = false;
  const std::vector<RunReport> reports = {r};
  write_plotdata(dir.string(), reports);

  const auto delay = lines_of(slurp(dir / "delay_vs_vehicles.csv"));
  REQUIRE(delay.size() == 2);
  CHECK(delay[1] == "40,dfcv,,");
  // The other metrics were defined, so their rows carry values.
  const auto delivery = lines_of(slurp(dir / "delivery_vs_vehicles.csv"));
  CHECK(delivery[1] == "40,dfcv,0.95,0");
  std::filesystem::remove_all(dir);
}

TEST_CASE("failure curve csv lists one row per tolerated failure count") {
  const auto dir = temp_dir("curve");
  const auto path = dir / "failure_probability_curve.csv";
  RunReport r = sample_report();
  r.failure_probability_curve = {{0, 0.1}, {1, 0.5}, {2, 1.0}};
  write_failure_curve_csv(path.string(), r);

  const auto lines = lines_of(slurp(path));
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "k_max,probability");
  CHECK(lines[1] == "0,0.1");
  CHECK(lines[2] == "1,0.5");
  CHECK(lines[3] == "2,1");

  RunReport empty = sample_report();
  empty.failure_probability_curve.clear();
  write_failure_curve_csv(path.string(), empty);
  const auto only_header = lines_of(slurp(path));
  REQUIRE(only_header.size() == 1);
  CHECK(only_header[0] == "k_max,probability");
  std::filesystem::remove_all(dir);
}

TEST_CASE("csv writers refuse unwritable paths") {
  const std::vector<RunReport> reports = {sample_report()};
  CHECK_THROWS_AS(
      write_report_csv("/nonexistent_dir_zz/report.csv", reports),
      std::runtime_error);
  CHECK_THROWS_AS(write_events_csv("/nonexistent_dir_zz/events.csv", {}),
                  std::runtime_error);
}
