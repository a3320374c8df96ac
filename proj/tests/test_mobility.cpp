#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "dfcv/mobility.hpp"

using namespace dfcv;

namespace {

SimConfig small_config() {
  SimConfig c;
  c.vehicle_count = 24;
  c.lane_count = 4;
  return c;
}

void check_in_band(const MobilityState& s, double lo, double hi) {
  for (std::size_t i = 0; i < s.vehicles.size(); ++i) {
    CHECK(s.base_speed_mps[i] >= lo);
    CHECK(s.base_speed_mps[i] <= hi);
    CHECK(s.vehicles[i].speed_mps >= lo);
    CHECK(s.vehicles[i].speed_mps <= hi);
  }
}

}  // namespace

TEST_CASE("spawn_highway places every vehicle on the road, all forward") {
  const SimConfig c = small_config();
  Rng rng = Rng::labeled(c.seed, "spawn");
  const MobilityState s = spawn_highway(c, rng);
  REQUIRE(s.vehicles.size() == 24);
  REQUIRE(s.base_speed_mps.size() == 24);
  for (const Vehicle& v : s.vehicles) {
    CHECK(v.position.x >= 0.0);
    CHECK(v.position.x < c.road_length_m);
    CHECK(v.lane >= 0);
    CHECK(v.lane < c.lane_count);
    CHECK(v.position.y == lane_center_y(v.lane));
    CHECK(v.direction == Direction::forward);
  }
  check_in_band(s, c.speed_min_mps(), c.speed_max_mps());
}

TEST_CASE("spawn_urban splits directions by lane and halves the speed band") {
  const SimConfig c = small_config();
  Rng rng = Rng::labeled(c.seed, "spawn");
  const MobilityState s = spawn_urban(c, rng);
  const double mid = 0.5 * (c.speed_min_mps() + c.speed_max_mps());
  check_in_band(s, c.speed_min_mps(), mid);
  for (const Vehicle& v : s.vehicles) {
    CHECK(v.direction == urban_lane_direction(v.lane, c.lane_count));
  }
}

TEST_CASE("urban lane direction convention") {
  // 4 lanes: 0,1 forward; 2,3 backward.
  CHECK(urban_lane_direction(0, 4) == Direction::forward);
  CHECK(urban_lane_direction(1, 4) == Direction::forward);
  CHECK(urban_lane_direction(2, 4) == Direction::backward);
  CHECK(urban_lane_direction(3, 4) == Direction::backward);
  // 3 lanes: ceil(3/2) = 2 forward.
  CHECK(urban_lane_direction(0, 3) == Direction::forward);
  CHECK(urban_lane_direction(1, 3) == Direction::forward);
  CHECK(urban_lane_direction(2, 3) == Direction::backward);
}

TEST_CASE("step_highway advances forward, wraps, and jitters within 5%") {
  const SimConfig c = small_config();
  Rng spawn_rng = Rng::labeled(3, "spawn");
  MobilityState s = spawn_highway(c, spawn_rng);
  Rng step_rng = Rng::labeled(3, "mobility");
  const std::vector<Vehicle> before = s.vehicles;
  const double dt = 0.1;
  step_highway(s, dt, step_rng);
  CHECK(s.current_time == doctest::Approx(dt));
  for (std::size_t i = 0; i < s.vehicles.size(); ++i) {
    const Vehicle& v = s.vehicles[i];
    CHECK(v.position.x >= 0.0);
    CHECK(v.position.x < c.road_length_m);
    const double moved =
        wrap_position(v.position.x - before[i].position.x, c.road_length_m);
    // Forward motion: displacement equals speed*dt modulo the wrap.
    CHECK(moved == doctest::Approx(v.speed_mps * dt).epsilon(1e-9));
    const double base = s.base_speed_mps[i];
    CHECK(v.speed_mps >= std::max(0.95 * base, c.speed_min_mps()) - 1e-12);
    CHECK(v.speed_mps <= std::min(1.05 * base, c.speed_max_mps()) + 1e-12);
    CHECK(v.position.y == before[i].position.y);  // no lane changes
  }
}

TEST_CASE("step_urban honors per-lane direction") {
  const SimConfig c = small_config();
  Rng spawn_rng = Rng::labeled(5, "spawn");
  MobilityState s = spawn_urban(c, spawn_rng);
  Rng step_rng = Rng::labeled(5, "mobility");
  const std::vector<Vehicle> before = s.vehicles;
  step_urban(s, 0.1, step_rng);
  for (std::size_t i = 0; i < s.vehicles.size(); ++i) {
    const double delta = s.vehicles[i].position.x - before[i].position.x;
    const double fwd = wrap_position(delta, c.road_length_m);
    const double bwd = wrap_position(-delta, c.road_length_m);
    if (before[i].direction == Direction::forward) {
      CHECK(fwd == doctest::Approx(s.vehicles[i].speed_mps * 0.1));
    } else {
      CHECK(bwd == doctest::Approx(s.vehicles[i].speed_mps * 0.1));
    }
  }
}

TEST_CASE("step_urban with all_forward matches step_highway draw-for-draw") {
  const SimConfig c = small_config();
  Rng spawn_rng = Rng::labeled(9, "spawn");
  MobilityState a = spawn_highway(c, spawn_rng);
  MobilityState b = a;
  Rng rng_a = Rng::labeled(9, "mobility");
  Rng rng_b = Rng::labeled(9, "mobility");
  for (int t = 0; t < 10; ++t) {
    step_highway(a, 0.1, rng_a);
    step_urban(b, 0.1, rng_b, /*all_forward=*/true);
  }
  for (std::size_t i = 0; i < a.vehicles.size(); ++i) {
    CHECK(a.vehicles[i].position.x == b.vehicles[i].position.x);
    CHECK(a.vehicles[i].speed_mps == b.vehicles[i].speed_mps);
  }
}

TEST_CASE("stepping rejects non-positive dt") {
  const SimConfig c = small_config();
  Rng rng = Rng::labeled(1, "spawn");
  MobilityState s = spawn_highway(c, rng);
  Rng step_rng = Rng::labeled(1, "mobility");
  CHECK_THROWS_AS(step_highway(s, 0.0, step_rng), std::invalid_argument);
  CHECK_THROWS_AS(step_highway(s, -0.1, step_rng), std::invalid_argument);
  CHECK_THROWS_AS(step_urban(s, 0.0, step_rng), std::invalid_argument);
}

TEST_CASE("spawning is a pure function of the rng stream") {
  const SimConfig c = small_config();
  Rng r1 = Rng::labeled(77, "spawn");
  Rng r2 = Rng::labeled(77, "spawn");
  const MobilityState a = spawn_urban(c, r1);
  const MobilityState b = spawn_urban(c, r2);
  for (std::size_t i = 0; i < a.vehicles.size(); ++i) {
    CHECK(a.vehicles[i].position.x == b.vehicles[i].position.x);
    CHECK(a.vehicles[i].lane == b.vehicles[i].lane);
    CHECK(a.base_speed_mps[i] == b.base_speed_mps[i]);
  }
}
