#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "dfcv/geometry.hpp"

namespace dfcv {

enum class Direction { forward, backward };

/// Terminal-layer node. Vehicles are the only terminal devices modeled.
struct Vehicle {
  int id = 0;
  Vec2 position;
  double speed_mps = 0.0;
  int lane = 0;
  Direction direction = Direction::forward;
  std::vector<std::int64_t> buffer;  // pending message ids
};

/// Road Side Unit: fixed relay between vehicles and its base station.
struct Rsu {
  int id = 0;
  Vec2 position;
  double range_m = 0.0;
  int base_station_id = -1;
};

struct BaseStation {
  int id = 0;
  Vec2 position;
  double coverage_radius_m = 0.0;
  std::set<int> rsu_ids;
};

struct Message {
  std::int64_t id = 0;
  int sender_id = -1;
  std::set<int> recipient_ids;
  int size_bytes = 0;
  double created_at = 0.0;
  std::map<int, double> delivered_at;  // recipient -> sim seconds
  std::map<int, int> hop_count;        // recipient -> path legs
};

/// Edge-layer grouping of vehicles and RSUs under one base station.
struct FogLayer {
  int id = 0;
  int base_station_id = -1;
  std::set<int> member_vehicle_ids;
  std::set<int> rsu_ids;
  double created_at = 0.0;
  int allocated_units = 0;
};

// Vehicles, RSUs and base stations live in separate id spaces. Radio-layer
// node ids are unified by offsetting; vehicles keep their raw ids.
inline constexpr int kRsuNodeBase = 1'000'000;
inline constexpr int kBsNodeBase = 2'000'000;
inline constexpr int kCloudNodeId = 3'000'000;

inline int rsu_node_id(int rsu_id) { return kRsuNodeBase + rsu_id; }
inline int bs_node_id(int bs_id) { return kBsNodeBase + bs_id; }

}  // namespace dfcv
