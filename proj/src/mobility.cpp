#include "dfcv/mobility.hpp"

#include <algorithm>
#include <stdexcept>

namespace dfcv {

namespace {

constexpr double kSpeedJitter = 0.05;

MobilityState spawn(const SimConfig& config, Rng& rng, bool urban) {
  MobilityState state;
  state.road_length_m = config.road_length_m;
  state.speed_min_mps = config.speed_min_mps();
  // Urban traffic creeps: speeds come from the lower half of the band.
  state.speed_max_mps = urban
      ? 0.5 * (config.speed_min_mps() + config.speed_max_mps())
      : config.speed_max_mps();
  state.vehicles.reserve(config.vehicle_count);
  state.base_speed_mps.reserve(config.vehicle_count);
  for (int i = 0; i < config.vehicle_count; ++i) {
    Vehicle v;
    v.id = i;
    double x = rng.uniform(0.0, config.road_length_m);
    v.lane = static_cast<int>(rng.uniform_int(config.lane_count));
    v.position = {x, lane_center_y(v.lane)};
    double speed = rng.uniform(state.speed_min_mps, state.speed_max_mps);
    v.speed_mps = speed;
    v.direction = urban ? urban_lane_direction(v.lane, config.lane_count)
                        : Direction::forward;
    state.vehicles.push_back(std::move(v));
    state.base_speed_mps.push_back(speed);
  }
  return state;
}

void step(MobilityState& state, double dt, Rng& rng, bool honor_direction) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("mobility step requires dt > 0");
  }
  for (std::size_t i = 0; i < state.vehicles.size(); ++i) {
    Vehicle& v = state.vehicles[i];
    double jitter = rng.uniform(-kSpeedJitter, kSpeedJitter);
    double speed = state.base_speed_mps[i] * (1.0 + jitter);
    speed = std::clamp(speed, state.speed_min_mps, state.speed_max_mps);
    v.speed_mps = speed;
    double sign =
        (honor_direction && v.direction == Direction::backward) ? -1.0 : 1.0;
    v.position.x =
        wrap_position(v.position.x + sign * speed * dt, state.road_length_m);
  }
  state.current_time += dt;
}

}  // namespace

Direction urban_lane_direction(int lane, int lane_count) {
  const int forward_lanes = (lane_count + 1) / 2;
  return lane < forward_lanes ? Direction::forward : Direction::backward;
}

MobilityState spawn_highway(const SimConfig& config, Rng& rng) {
  return spawn(config, rng, /*urban=*/false);
}

MobilityState spawn_urban(const SimConfig& config, Rng& rng) {
  return spawn(config, rng, /*urban=*/true);
}

void step_highway(MobilityState& state, double dt, Rng& rng) {
  step(state, dt, rng, /*honor_direction=*/false);
}

void step_urban(MobilityState& state, double dt, Rng& rng, bool all_forward) {
  step(state, dt, rng, /*honor_direction=*/!all_forward);
}

}  // namespace dfcv
