#include "dfcv/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <vector>

namespace dfcv {

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  return out;
}

}  // namespace

void write_report_csv(const std::string& path,
                      std::span<const RunReport> reports) {
  std::ofstream out = open_for_write(path);
  out << "protocol,scenario,vehicle_count,seed,mean_delay_s,median_delay_s,"
         "p95_delay_s,delivery_probability,collision_ratio,split_count,"
         "merge_count,destroy_count\n";
  for (const RunReport& r : reports) {
    out << to_string(r.protocol) << ',' << to_string(r.scenario) << ','
        << r.vehicle_count << ',' << r.seed << ',';
    if (r.has_delay_stats) {
      out << format_double(r.mean_delay_s) << ','
          << format_double(r.median_delay_s) << ','
          << format_double(r.p95_delay_s) << ',';
    } else {
      out << ",,,";
    }
    if (r.has_delivery_probability) {
      out << format_double(r.delivery_probability);
    }
    out << ',';
    if (r.has_collision_ratio) {
      out << format_double(r.collision_ratio);
    }
    out << ',' << r.split_count << ',' << r.merge_count << ','
        << r.destroy_count << '\n';
  }
}

void write_events_csv(const std::string& path, const EventLog& events) {
  std::ofstream out = open_for_write(path);
  out << "time_s,kind,detail\n";
  for (const Event& e : events) {
    out << format_double(e.time_s) << ',' << to_string(e.kind) << ','
        << e.detail << '\n';
  }
}

namespace {

struct CellStats {
  bool has_value = false;
  double mean = 0.0;
  double stddev = 0.0;
};

/// Mean and population stddev over the defined per-seed values.
CellStats summarize(const std::vector<double>& values) {
  CellStats stats;
  if (values.empty()) return stats;
  stats.has_value = true;
  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - stats.mean) * (v - stats.mean);
  stats.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  return stats;
}

void write_metric_file(const std::string& path,
                       std::span<const RunReport> reports,
                       bool (*defined)(const RunReport&),
                       double (*value)(const RunReport&)) {
  std::map<std::pair<int, std::string>, std::vector<double>> cells;
  for (const RunReport& r : reports) {
    auto key = std::make_pair(r.vehicle_count, to_string(r.protocol));
    auto& bucket = cells[key];  // row exists even if every seed is undefined
    if (defined(r)) bucket.push_back(value(r));
  }
  std::ofstream out = open_for_write(path);
  out << "vehicle_count,protocol,mean,stddev_over_seeds\n";
  for (const auto& [key, values] : cells) {
    CellStats stats = summarize(values);
    out << key.first << ',' << key.second << ',';
    if (stats.has_value) {
      out << format_double(stats.mean) << ',' << format_double(stats.stddev);
    } else {
      out << ',';
    }
    out << '\n';
  }
}

}  // namespace

void write_plotdata(const std::string& dir,
                    std::span<const RunReport> reports) {
  write_metric_file(
      dir + "/delay_vs_vehicles.csv", reports,
      [](const RunReport& r) { return r.has_delay_stats; },
      [](const RunReport& r) { return r.mean_delay_s; });
  write_metric_file(
      dir + "/delivery_vs_vehicles.csv", reports,
      [](const RunReport& r) { return r.has_delivery_probability; },
      [](const RunReport& r) { return r.delivery_probability; });
  write_metric_file(
      dir + "/collision_vs_vehicles.csv", reports,
      [](const RunReport& r) { return r.has_collision_ratio; },
      [](const RunReport& r) { return r.collision_ratio; });
}

void write_failure_curve_csv(const std::string& path,
                             const RunReport& report) {
  std::ofstream out = open_for_write(path);
  out << "k_max,probability\n";
  for (const auto& [k, p] : report.failure_probability_curve) {
    out << k << ',' << format_double(p) << '\n';
  }
}

}  // namespace dfcv
