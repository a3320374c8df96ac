#pragma once

#include <map>
#include <string>
#include <vector>

#include "dfcv/geometry.hpp"

namespace dfcv {

struct TraceSample {
  double time_s = 0.0;
  int vehicle_id = 0;  // dense id after normalization
  double x_m = 0.0;
  double y_m = 0.0;
  double speed_mps = 0.0;
  int lane = 0;
};

/// Floating-car-data timeline: per-vehicle samples strictly increasing in
/// time. Vehicle ids are normalized to dense integers (original ids sorted
/// ascending map to 0..n-1).
struct TraceTimeline {
  std::vector<std::vector<TraceSample>> per_vehicle;  // indexed by dense id
  std::map<long long, int> original_to_dense;

  int vehicle_count() const { return static_cast<int>(per_vehicle.size()); }
  double span_end(int vehicle_id) const;
};

struct TracePoint {
  Vec2 position;
  double speed_mps = 0.0;
  int lane = 0;
};

/// Parses a trace CSV with header `time_s,vehicle_id,x_m,y_m,speed_mps,lane`.
/// Malformed rows are reported with their line number; per-vehicle
/// timestamps must be strictly increasing and x positions must lie within
/// [0, road_length_m] with lane in [0, lane_count). Throws
/// std::runtime_error describing every reason a file is unusable.
TraceTimeline load_trace(const std::string& path, double road_length_m,
                         int lane_count);

/// Position and speed at time t by linear interpolation between the
/// bracketing samples; exact sample times return the sample verbatim.
/// Throws std::out_of_range if t is outside the vehicle's sample span or
/// the vehicle is unknown.
TracePoint position_at(const TraceTimeline& timeline, int vehicle_id,
                       double t);

}  // namespace dfcv
