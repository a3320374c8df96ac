#pragma once

#include <vector>

#include "dfcv/config.hpp"
#include "dfcv/rng.hpp"
#include "dfcv/types.hpp"

namespace dfcv {

/// Positions of every vehicle at current_time, plus what the stepping
/// models need: the per-vehicle cruise speed drawn at spawn and the road
/// geometry the positions must stay within.
struct MobilityState {
  std::vector<Vehicle> vehicles;
  std::vector<double> base_speed_mps;  // drawn once at spawn, jittered per step
  double current_time = 0.0;
  double road_length_m = 0.0;
  double speed_min_mps = 0.0;
  double speed_max_mps = 0.0;
};

/// Uniform random placement, speeds drawn from the full config band, all
/// vehicles forward. Highway traffic per the scenario split.
MobilityState spawn_highway(const SimConfig& config, Rng& rng);

/// As spawn_highway, but lanes in the upper half carry backward traffic and
/// speeds come from the lower half of the band.
MobilityState spawn_urban(const SimConfig& config, Rng& rng);

/// Lane direction convention for urban runs: with n lanes, lanes
/// [0, ceil(n/2)) run forward and the rest backward.
Direction urban_lane_direction(int lane, int lane_count);

/// Advances every vehicle one step in the forward direction. Per-vehicle
/// speed this step is the spawn speed with +/-5% jitter, clamped to the
/// band; positions wrap at the road ends so density is conserved.
/// dt must be > 0.
void step_highway(MobilityState& state, double dt, Rng& rng);

/// As step_highway but vehicles honor their per-lane direction. With
/// all_forward set the direction field is ignored and the step is identical
/// to step_highway.
void step_urban(MobilityState& state, double dt, Rng& rng,
                bool all_forward = false);

}  // namespace dfcv
