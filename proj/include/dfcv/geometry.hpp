#pragma once

#include <cmath>

namespace dfcv {

/// 2-D point/vector in meters. The road runs along x; lanes are offset in y.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2& a, const Vec2& b) = default;
};

inline double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Lateral offset between adjacent lane centerlines.
inline constexpr double kLaneWidthM = 3.5;

// mph <-> m/s. Exact statute-mile factor.
inline constexpr double kMphToMps = 0.44704;

inline double mph_to_mps(double mph) { return mph * kMphToMps; }
inline double mps_to_mph(double mps) { return mps / kMphToMps; }

/// Wraps x into [0, length). Positions are toroidal along the road axis
/// so vehicle density stays constant over a run.
inline double wrap_position(double x, double length) {
  double w = std::fmod(x, length);
  if (w < 0.0) w += length;
  return w;
}

inline double lane_center_y(int lane) { return lane * kLaneWidthM; }

}  // namespace dfcv
