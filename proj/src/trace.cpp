#include "dfcv/trace.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dfcv {

namespace {

constexpr const char* kHeader = "time_s,vehicle_id,x_m,y_m,speed_mps,lane";

struct RawRow {
  double time_s;
  long long vehicle_id;
  double x_m, y_m, speed_mps;
  int lane;
};

bool parse_row(const std::string& line, RawRow& row) {
  std::istringstream ss(line);
  std::string field;
  auto next_double = [&](double& out) {
    if (!std::getline(ss, field, ',')) return false;
    try {
      std::size_t pos = 0;
      out = std::stod(field, &pos);
      return pos == field.size();
    } catch (...) {
      return false;
    }
  };
  auto next_int = [&](long long& out) {
    if (!std::getline(ss, field, ',')) return false;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [p, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && p == end;
  };
  long long lane = 0;
  if (!next_double(row.time_s)) return false;
  if (!next_int(row.vehicle_id)) return false;
  if (!next_double(row.x_m)) return false;
  if (!next_double(row.y_m)) return false;
  if (!next_double(row.speed_mps)) return false;
  if (!next_int(lane)) return false;
  if (std::getline(ss, field, ',')) return false;  // trailing fields
  row.lane = static_cast<int>(lane);
  return true;
}

}  // namespace

double TraceTimeline::span_end(int vehicle_id) const {
  return per_vehicle.at(vehicle_id).back().time_s;
}

TraceTimeline load_trace(const std::string& path, double road_length_m,
                         int lane_count) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);

  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw std::runtime_error(path + ":1: expected header \"" +
                             std::string(kHeader) + "\"");
  }

  std::map<long long, std::vector<RawRow>> rows_by_vehicle;
  int line_no = 1;
  int sample_count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    RawRow row;
    if (!parse_row(line, row)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed row \"" + line + "\"");
    }
    if (row.x_m < 0.0 || row.x_m > road_length_m) {
      std::ostringstream os;
      os << path << ":" << line_no << ": x position " << row.x_m
         << " outside road bounds [0, " << road_length_m << "]";
      throw std::runtime_error(os.str());
    }
    if (row.lane < 0 || row.lane >= lane_count) {
      std::ostringstream os;
      os << path << ":" << line_no << ": lane " << row.lane
         << " outside [0, " << lane_count << ")";
      throw std::runtime_error(os.str());
    }
    rows_by_vehicle[row.vehicle_id].push_back(row);
    ++sample_count;
  }
  if (sample_count == 0) throw std::runtime_error(path + ": no samples");

  TraceTimeline timeline;
  int dense = 0;
  for (auto& [original_id, rows] : rows_by_vehicle) {
    // Rows arrive sorted by time for well-formed files, but enforce it.
    std::stable_sort(rows.begin(), rows.end(),
                     [](const RawRow& a, const RawRow& b) {
                       return a.time_s < b.time_s;
                     });
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (!(rows[i].time_s > rows[i - 1].time_s)) {
        std::ostringstream os;
        os << path << ": vehicle " << original_id
           << " has non-increasing timestamps at t=" << rows[i].time_s;
        throw std::runtime_error(os.str());
      }
    }
    timeline.original_to_dense[original_id] = dense;
    std::vector<TraceSample> samples;
    samples.reserve(rows.size());
    for (const RawRow& r : rows) {
      samples.push_back({r.time_s, dense, r.x_m, r.y_m, r.speed_mps, r.lane});
    }
    timeline.per_vehicle.push_back(std::move(samples));
    ++dense;
  }
  return timeline;
}

TracePoint position_at(const TraceTimeline& timeline, int vehicle_id,
                       double t) {
  if (vehicle_id < 0 || vehicle_id >= timeline.vehicle_count()) {
    throw std::out_of_range("unknown trace vehicle id " +
                            std::to_string(vehicle_id));
  }
  const auto& samples = timeline.per_vehicle[vehicle_id];
  if (t < samples.front().time_s || t > samples.back().time_s) {
    std::ostringstream os;
    os << "t=" << t << " outside sample span [" << samples.front().time_s
       << ", " << samples.back().time_s << "] of vehicle " << vehicle_id;
    throw std::out_of_range(os.str());
  }
  auto upper = std::lower_bound(
      samples.begin(), samples.end(), t,
      [](const TraceSample& s, double value) { return s.time_s < value; });
  if (upper->time_s == t) {
    return {{upper->x_m, upper->y_m}, upper->speed_mps, upper->lane};
  }
  const TraceSample& hi = *upper;
  const TraceSample& lo = *(upper - 1);
  double w = (t - lo.time_s) / (hi.time_s - lo.time_s);
  return {{lo.x_m + w * (hi.x_m - lo.x_m), lo.y_m + w * (hi.y_m - lo.y_m)},
          lo.speed_mps + w * (hi.speed_mps - lo.speed_mps),
          lo.lane};
}

}  // namespace dfcv
