// Exercises the command-line binary end to end. The test runner passes the
// binary location as --bin=<path>; everything else goes to doctest.
#define DOCTEST_CONFIG_IMPLEMENT
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace {

std::string g_bin;

int run_cli(const std::string& args, const std::string& stderr_file = "") {
  std::string cmd = g_bin + " " + args;
  cmd += stderr_file.empty() ? " 2>/dev/null" : " 2>" + stderr_file;
  cmd += " >/dev/null";
  const int raw = std::system(cmd.c_str());
  REQUIRE(raw != -1);
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

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

std::filesystem::path fresh_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("dfcv_cli_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::filesystem::path write_file(const std::filesystem::path& dir,
                                 const std::string& name,
                                 const std::string& body) {
  const auto path = dir / name;
  std::ofstream out(path);
  out << body;
  return path;
}

const char* kSmallConfig = R"({
  "vehicle_count": 10,
  "sim_duration_s": 10.0,
  "seed": 9
})";

}  // namespace

TEST_CASE("run writes a report row, events, and plot data") {
  const auto dir = fresh_dir("run");
  const auto config = write_file(dir, "config.json", kSmallConfig);
  const auto out = dir / "out";
  CHECK(run_cli("run --config " + config.string() + " --out " + out.string()) ==
        0);

  const auto report = lines_of(slurp(out / "report.csv"));
  REQUIRE(report.size() == 2);
  CHECK(report[0].rfind("protocol,scenario,vehicle_count,seed,", 0) == 0);
  CHECK(report[1].rfind("dfcv,urban,10,9,", 0) == 0);

  const auto events = lines_of(slurp(out / "events.csv"));
  REQUIRE(!events.empty());
  CHECK(events[0] == "time_s,kind,detail");

  for (const char* name : {"delay_vs_vehicles.csv", "delivery_vs_vehicles.csv",
                           "collision_vs_vehicles.csv",
                           "failure_probability_curve.csv"}) {
    CHECK(std::filesystem::exists(out / "plotdata" / name));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("the seed flag overrides the config seed") {
  const auto dir = fresh_dir("seed");
  const auto config = write_file(dir, "config.json", kSmallConfig);
  const auto out = dir / "out";
  CHECK(run_cli("run --config " + config.string() + " --seed 42 --out " +
                out.string()) == 0);
  const auto report = lines_of(slurp(out / "report.csv"));
  REQUIRE(report.size() == 2);
  CHECK(report[1].rfind("dfcv,urban,10,42,", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("identical invocations produce byte-identical outputs") {
  const auto dir = fresh_dir("determinism");
  const auto config = write_file(dir, "config.json", kSmallConfig);
  const auto out_a = dir / "a";
  const auto out_b = dir / "b";
  const std::string tail = "run --config " + config.string() + " --out ";
  CHECK(run_cli(tail + out_a.string()) == 0);
  CHECK(run_cli(tail + out_b.string()) == 0);
  CHECK(slurp(out_a / "report.csv") == slurp(out_b / "report.csv"));
  CHECK(slurp(out_a / "events.csv") == slurp(out_b / "events.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("a scripted trace drives the run") {
  const auto dir = fresh_dir("trace");
  const auto config = write_file(dir, "config.json", R"({
    "vehicle_count": 2,
    "sim_duration_s": 5.0,
    "message_generation_rate": 0.5
  })");
  const auto trace = write_file(dir, "trace.csv",
                                "time_s,vehicle_id,x_m,y_m,speed_mps,lane\n"
                                "0.0,0,100.0,0.0,10.0,0\n"
                                "5.0,0,150.0,0.0,10.0,0\n"
                                "0.0,1,200.0,0.0,10.0,0\n"
                                "5.0,1,250.0,0.0,10.0,0\n");
  const auto out = dir / "out";
  CHECK(run_cli("run --config " + config.string() + " --trace " +
                trace.string() + " --out " + out.string()) == 0);
  const auto report = lines_of(slurp(out / "report.csv"));
  REQUIRE(report.size() == 2);
  CHECK(report[1].rfind("dfcv,urban,2,", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep emits one row per grid cell in sorted order") {
  const auto dir = fresh_dir("sweep");
  const auto config = write_file(dir, "config.json", R"({
    "vehicle_count": 10,
    "sim_duration_s": 5.0
  })");
  const auto out = dir / "out";
  CHECK(run_cli("sweep --config " + config.string() +
                " --vehicle-counts 10,20 --seeds 2 --out " + out.string()) ==
        0);
  const auto report = lines_of(slurp(out / "report.csv"));
  REQUIRE(report.size() == 5);  // header + 2 counts x 1 protocol x 2 seeds
  CHECK(report[1].rfind("dfcv,urban,10,1,", 0) == 0);
  CHECK(report[2].rfind("dfcv,urban,10,2,", 0) == 0);
  CHECK(report[3].rfind("dfcv,urban,20,1,", 0) == 0);
  CHECK(report[4].rfind("dfcv,urban,20,2,", 0) == 0);

  const auto delay = lines_of(slurp(out / "plotdata" / "delay_vs_vehicles.csv"));
  REQUIRE(delay.size() == 3);
  CHECK(delay[1].rfind("10,dfcv,", 0) == 0);
  CHECK(delay[2].rfind("20,dfcv,", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("compare covers all three protocols at one vehicle count") {
  const auto dir = fresh_dir("compare");
  const auto config = write_file(dir, "config.json", R"({
    "vehicle_count": 10,
    "sim_duration_s": 5.0
  })");
  const auto out = dir / "out";
  CHECK(run_cli("compare --config " + config.string() + " --seeds 1 --out " +
                out.string()) == 0);
  const auto report = lines_of(slurp(out / "report.csv"));
  REQUIRE(report.size() == 4);
  CHECK(report[1].rfind("cloud-only,urban,10,", 0) == 0);
  CHECK(report[2].rfind("dfcv,urban,10,", 0) == 0);
  CHECK(report[3].rfind("static-fog,urban,10,", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("bad invocations exit with status 1") {
  const auto dir = fresh_dir("errors");
  CHECK(run_cli("") == 1);              // a subcommand is required
  CHECK(run_cli("run --no-such-flag") == 1);
  CHECK(run_cli("frobnicate") == 1);
  CHECK(run_cli("run --config /does/not/exist.json") == 1);

  const auto bad_values = write_file(dir, "bad_values.json", R"({
    "vehicle_count": 1
  })");
  const auto err_file = (dir / "stderr.txt").string();
  CHECK(run_cli("run --config " + bad_values.string(), err_file) == 1);
  CHECK(slurp(err_file).find("invalid config") != std::string::npos);

  const auto bad_key = write_file(dir, "bad_key.json", R"({
    "vehicle_cuont": 40
  })");
  CHECK(run_cli("run --config " + bad_key.string(), err_file) == 1);
  CHECK(slurp(err_file).find("vehicle_cuont") != std::string::npos);
  std::filesystem::remove_all(dir);
}

int main(int argc, char** argv) {
  std::vector<char*> forwarded;
  for (int i = 0; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--bin=", 0) == 0) {
      g_bin = arg.substr(6);
    } else {
      forwarded.push_back(argv[i]);
    }
  }
  if (g_bin.empty()) {
    std::fprintf(stderr, "usage: %s --bin=<path-to-dfcv> [doctest args]\n",
                 argv[0]);
    return 1;
  }
  doctest::Context context(static_cast<int>(forwarded.size()),
                           forwarded.data());
  return context.run();
}
