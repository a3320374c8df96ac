#include "dfcv/fog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dfcv/geometry.hpp"

namespace dfcv {

ResourceLedger::ResourceLedger(int total_pool)
    : total_pool_(total_pool), remaining_(total_pool) {
  if (total_pool < 0) {
    throw std::invalid_argument("resource pool size must be non-negative");
  }
}

int ResourceLedger::allocation(int fog_id) const {
  auto it = allocations_.find(fog_id);
  return it == allocations_.end() ? 0 : it->second;
}

void ResourceLedger::allocate(int fog_id, int units) {
  if (units < 0) {
    throw std::invalid_argument("cannot allocate a negative unit count");
  }
  if (units > remaining_) {
    std::ostringstream msg;
    msg << "allocation of " << units << " units exceeds pool remainder "
        << remaining_;
    throw std::invalid_argument(msg.str());
  }
  remaining_ -= units;
  allocations_[fog_id] += units;
}

void ResourceLedger::release(int fog_id, int units) {
  if (units < 0) {
    throw std::invalid_argument("cannot release a negative unit count");
  }
  auto it = allocations_.find(fog_id);
  int held = it == allocations_.end() ? 0 : it->second;
  if (units > held) {
    std::ostringstream msg;
    msg << "release of " << units << " units exceeds fog " << fog_id
        << " allocation " << held;
    throw std::invalid_argument(msg.str());
  }
  remaining_ += units;
  if (it != allocations_.end()) {
    it->second -= units;
    if (it->second == 0) allocations_.erase(it);
  }
}

void ResourceLedger::split_allocation(int fog_id, int child_a, int child_b,
                                      std::size_t members_a,
                                      std::size_t members_b) {
  auto it = allocations_.find(fog_id);
  int units = it == allocations_.end() ? 0 : it->second;
  if (it != allocations_.end()) allocations_.erase(it);
  std::size_t total = members_a + members_b;
  if (total == 0) {
    throw std::invalid_argument("splitting an allocation between two empty fogs");
  }
  int to_b = static_cast<int>(static_cast<long long>(units) *
                              static_cast<long long>(members_b) /
                              static_cast<long long>(total));
  int to_a = units - to_b;  // remainder stays with child_a
  if (to_a > 0) allocations_[child_a] = to_a;
  if (to_b > 0) allocations_[child_b] = to_b;
}

void ResourceLedger::merge_allocations(std::span<const int> fog_ids,
                                       int merged_id) {
  int combined = 0;
  for (int id : fog_ids) {
    auto it = allocations_.find(id);
    if (it != allocations_.end()) {
      combined += it->second;
      allocations_.erase(it);
    }
  }
  if (combined > 0) allocations_[merged_id] += combined;
}

void ResourceLedger::release_all(int fog_id) {
  auto it = allocations_.find(fog_id);
  if (it == allocations_.end()) return;
  remaining_ += it->second;
  allocations_.erase(it);
}

int FogTopology::fog_of_vehicle(int vehicle_id) const {
  auto it = vehicle_to_fog.find(vehicle_id);
  return it == vehicle_to_fog.end() ? -1 : it->second;
}

std::vector<int> FogTopology::fogs_of_base_station(int bs_id) const {
  std::vector<int> out;
  for (const auto& [id, fog] : fogs) {
    if (fog.base_station_id == bs_id) out.push_back(id);
  }
  return out;
}

void FogTopology::check_consistent() const {
  for (const auto& [vid, fid] : vehicle_to_fog) {
    auto it = fogs.find(fid);
    if (it == fogs.end()) {
      std::ostringstream msg;
      msg << "vehicle " << vid << " maps to missing fog " << fid;
      throw std::logic_error(msg.str());
    }
    if (!it->second.member_vehicle_ids.count(vid)) {
      std::ostringstream msg;
      msg << "vehicle " << vid << " maps to fog " << fid
          << " but is not in its member set";
      throw std::logic_error(msg.str());
    }
  }
  for (const auto& [fid, fog] : fogs) {
    for (int vid : fog.member_vehicle_ids) {
      auto it = vehicle_to_fog.find(vid);
      if (it == vehicle_to_fog.end() || it->second != fid) {
        std::ostringstream msg;
        msg << "fog " << fid << " lists member " << vid
            << " whose map entry "
            << (it == vehicle_to_fog.end() ? std::string("is missing")
                                           : "points to fog " +
                                                 std::to_string(it->second))
            << " disagrees";
        throw std::logic_error(msg.str());
      }
    }
    for (int rid : fog.rsu_ids) {
      auto it = rsu_to_fog.find(rid);
      if (it == rsu_to_fog.end() || it->second != fid) {
        std::ostringstream msg;
        msg << "fog " << fid << " lists rsu " << rid
            << " but rsu_to_fog disagrees";
        throw std::logic_error(msg.str());
      }
    }
  }
  for (const auto& [rid, fid] : rsu_to_fog) {
    auto it = fogs.find(fid);
    if (it == fogs.end() || !it->second.rsu_ids.count(rid)) {
      std::ostringstream msg;
      msg << "rsu " << rid << " maps to fog " << fid
          << " which does not list it";
      throw std::logic_error(msg.str());
    }
  }
  for (const auto& [fid, fog] : fogs) {
    if (fog.id != fid) {
      std::ostringstream msg;
      msg << "fog map key " << fid << " holds a fog whose id field is "
          << fog.id;
      throw std::logic_error(msg.str());
    }
    if (fid >= next_fog_id) {
      std::ostringstream msg;
      msg << "fog id " << fid << " is not below next_fog_id " << next_fog_id;
      throw std::logic_error(msg.str());
    }
  }
}

namespace {

void associate_one(const Vehicle& v, std::span<const Rsu> rsus,
                   int& rsu_out, int& bs_out) {
  double best = std::numeric_limits<double>::infinity();
  int best_rsu = -1;
  int best_bs = -1;
  for (const Rsu& r : rsus) {
    double d = distance(v.position, r.position);
    if (d > r.range_m) continue;
    if (d < best || (d == best && best_rsu >= 0 && r.id < best_rsu)) {
      best = d;
      best_rsu = r.id;
      best_bs = r.base_station_id;
    }
  }
  rsu_out = best_rsu;
  bs_out = best_bs;
}

}  // namespace

Association associate_serial(std::span<const Vehicle> vehicles,
                             std::span<const Rsu> rsus) {
  Association out;
  out.rsu_of_vehicle.resize(vehicles.size(), -1);
  out.bs_of_vehicle.resize(vehicles.size(), -1);
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    associate_one(vehicles[i], rsus, out.rsu_of_vehicle[i],
                  out.bs_of_vehicle[i]);
  }
  return out;
}

Association associate(std::span<const Vehicle> vehicles,
                      std::span<const Rsu> rsus) {
  Association out;
  out.rsu_of_vehicle.resize(vehicles.size(), -1);
  out.bs_of_vehicle.resize(vehicles.size(), -1);
  const std::int64_t n = static_cast<std::int64_t>(vehicles.size());
  const std::int64_t work = n * static_cast<std::int64_t>(rsus.size());
#pragma omp parallel for schedule(static) if (work > (1 << 14))
  for (std::int64_t i = 0; i < n; ++i) {
    associate_one(vehicles[static_cast<std::size_t>(i)], rsus,
                  out.rsu_of_vehicle[static_cast<std::size_t>(i)],
                  out.bs_of_vehicle[static_cast<std::size_t>(i)]);
  }
  return out;
}

double fog_capacity(std::size_t fog_member_count,
                    std::size_t region_vehicle_count) {
  if (region_vehicle_count == 0) {
    throw std::domain_error(
        "fog capacity is undefined for an empty region (no vehicles)");
  }
  if (fog_member_count > region_vehicle_count) {
    throw std::invalid_argument(
        "fog member count exceeds the region vehicle count");
  }
  return static_cast<double>(fog_member_count) /
         static_cast<double>(region_vehicle_count);
}

double fog_capacity(const FogLayer& fog, std::size_t region_vehicle_count) {
  return fog_capacity(fog.member_vehicle_ids.size(), region_vehicle_count);
}

SplitDecision should_split(const Vec2& sender_position,
                           std::span<const Vec2> member_positions,
                           double d_min_m, double th_cap,
                           std::size_t region_vehicle_count) {
  for (const Vec2& p : member_positions) {
    if (distance(sender_position, p) > d_min_m) {
      return {true, SplitReason::distance};
    }
  }
  if (fog_capacity(member_positions.size(), region_vehicle_count) > th_cap) {
    return {true, SplitReason::capacity};
  }
  return {false, SplitReason::distance};
}

bool should_merge(std::span<const Vec2> members_a,
                  std::span<const Vec2> members_b, double d_min_m,
                  double th_cap, std::size_t region_vehicle_count) {
  for (const Vec2& a : members_a) {
    for (const Vec2& b : members_b) {
      if (distance(a, b) > d_min_m) return false;
    }
  }
  return fog_capacity(members_a.size() + members_b.size(),
                      region_vehicle_count) <= th_cap;
}

namespace {

std::string join_ids(std::span<const int> ids) {
  std::ostringstream out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out << ';';
    out << ids[i];
  }
  return out.str();
}

FogLayer make_fog(int id, int bs_id, std::vector<int> members, double now) {
  FogLayer fog;
  fog.id = id;
  fog.base_station_id = bs_id;
  fog.member_vehicle_ids.insert(members.begin(), members.end());
  fog.created_at = now;
  return fog;
}

}  // namespace

void rebuild_rsu_assignment(FogTopology& topology,
                            std::span<const int> rsu_of_vehicle) {
  // rsu id -> fog id -> member count served through that rsu
  std::map<int, std::map<int, int>> counts;
  for (const auto& [fid, fog] : topology.fogs) {
    for (int vid : fog.member_vehicle_ids) {
      if (vid < 0 || static_cast<std::size_t>(vid) >= rsu_of_vehicle.size()) {
        continue;
      }
      int rsu = rsu_of_vehicle[static_cast<std::size_t>(vid)];
      if (rsu >= 0) counts[rsu][fid] += 1;
    }
  }
  topology.rsu_to_fog.clear();
  for (auto& [fid, fog] : topology.fogs) {
    fog.rsu_ids.clear();
  }
  for (const auto& [rsu, per_fog] : counts) {
    int best_fog = -1;
    int best_count = 0;
    for (const auto& [fid, count] : per_fog) {
      if (count > best_count) {  // ties keep the lowest fog id (map order)
        best_count = count;
        best_fog = fid;
      }
    }
    topology.rsu_to_fog[rsu] = best_fog;
    topology.fogs.at(best_fog).rsu_ids.insert(rsu);
  }
}

SplitOutcome split_fog(FogTopology& topology, ResourceLedger& ledger,
                       int fog_id, std::span<const int> bs_of_vehicle,
                       std::span<const Vec2> vehicle_positions,
                       std::span<const int> rsu_of_vehicle,
                       SplitReason reason, double now, EventLog& events) {
  auto it = topology.fogs.find(fog_id);
  if (it == topology.fogs.end()) {
    throw std::invalid_argument("splitting a fog that does not exist: id " +
                                std::to_string(fog_id));
  }
  const FogLayer& fog = it->second;
  if (fog.member_vehicle_ids.size() < 2) {
    std::ostringstream detail;
    detail << "split-noop fog=" << fog_id << " reason=single-member";
    events.push_back({now, EventKind::warn, detail.str()});
    return {};
  }

  auto bs_of = [&](int vid) {
    if (vid >= 0 && static_cast<std::size_t>(vid) < bs_of_vehicle.size()) {
      return bs_of_vehicle[static_cast<std::size_t>(vid)];
    }
    return -1;
  };

  // Partition by current base station when members span more than one;
  // otherwise by position median along the road axis.
  std::map<int, std::vector<int>> by_bs;
  for (int vid : fog.member_vehicle_ids) by_bs[bs_of(vid)].push_back(vid);

  std::vector<int> members_a;
  std::vector<int> members_b;
  if (by_bs.size() >= 2) {
    members_a = by_bs.begin()->second;
    for (auto bit = std::next(by_bs.begin()); bit != by_bs.end(); ++bit) {
      members_b.insert(members_b.end(), bit->second.begin(),
                       bit->second.end());
    }
    std::sort(members_b.begin(), members_b.end());
  } else {
    std::vector<int> ordered(fog.member_vehicle_ids.begin(),
                             fog.member_vehicle_ids.end());
    std::sort(ordered.begin(), ordered.end(), [&](int lhs, int rhs) {
      double lx = vehicle_positions[static_cast<std::size_t>(lhs)].x;
      double rx = vehicle_positions[static_cast<std::size_t>(rhs)].x;
      if (lx != rx) return lx < rx;
      return lhs < rhs;
    });
    std::size_t half = (ordered.size() + 1) / 2;
    members_a.assign(ordered.begin(), ordered.begin() + half);
    members_b.assign(ordered.begin() + half, ordered.end());
    std::sort(members_a.begin(), members_a.end());
    std::sort(members_b.begin(), members_b.end());
  }

  auto group_bs = [&](const std::vector<int>& members, int fallback) {
    int bs = -1;
    for (int vid : members) {
      int b = bs_of(vid);
      if (b >= 0 && (bs < 0 || b < bs)) bs = b;
    }
    return bs >= 0 ? bs : fallback;
  };

  int id_a = topology.next_fog_id++;
  int id_b = topology.next_fog_id++;
  FogLayer fog_a =
      make_fog(id_a, group_bs(members_a, fog.base_station_id), members_a, now);
  FogLayer fog_b =
      make_fog(id_b, group_bs(members_b, fog.base_station_id), members_b, now);

  ledger.split_allocation(fog_id, id_a, id_b, members_a.size(),
                          members_b.size());
  fog_a.allocated_units = ledger.allocation(id_a);
  fog_b.allocated_units = ledger.allocation(id_b);

  topology.fogs.erase(it);
  topology.fogs.emplace(id_a, std::move(fog_a));
  topology.fogs.emplace(id_b, std::move(fog_b));
  for (int vid : members_a) topology.vehicle_to_fog[vid] = id_a;
  for (int vid : members_b) topology.vehicle_to_fog[vid] = id_b;
  rebuild_rsu_assignment(topology, rsu_of_vehicle);

  std::ostringstream detail;
  detail << "fog=" << fog_id << " into=" << id_a << ';' << id_b << " reason="
         << (reason == SplitReason::distance ? "distance" : "capacity")
         << " members=" << members_a.size() << ';' << members_b.size();
  events.push_back({now, EventKind::split, detail.str()});
  return {true, id_a, id_b};
}

int merge_fogs(FogTopology& topology, ResourceLedger& ledger,
               std::span<const int> fog_ids,
               std::span<const int> rsu_of_vehicle, double now,
               EventLog& events) {
  std::vector<int> ids(fog_ids.begin(), fog_ids.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() < 2) {
    throw std::invalid_argument(
        "merge requires at least two distinct fog ids");
  }
  int bs_id = -2;
  for (int id : ids) {
    auto it = topology.fogs.find(id);
    if (it == topology.fogs.end()) {
      throw std::invalid_argument("merging a fog that does not exist: id " +
                                  std::to_string(id));
    }
    if (bs_id == -2) {
      bs_id = it->second.base_station_id;
    } else if (it->second.base_station_id != bs_id) {
      throw std::invalid_argument(
          "merging fogs that belong to different base stations");
    }
  }

  int merged_id = topology.next_fog_id++;
  FogLayer merged;
  merged.id = merged_id;
  merged.base_station_id = bs_id;
  merged.created_at = now;
  for (int id : ids) {
    FogLayer& fog = topology.fogs.at(id);
    merged.member_vehicle_ids.insert(fog.member_vehicle_ids.begin(),
                                     fog.member_vehicle_ids.end());
  }
  ledger.merge_allocations(ids, merged_id);
  merged.allocated_units = ledger.allocation(merged_id);

  for (int id : ids) topology.fogs.erase(id);
  for (int vid : merged.member_vehicle_ids) {
    topology.vehicle_to_fog[vid] = merged_id;
  }
  topology.fogs.emplace(merged_id, std::move(merged));
  rebuild_rsu_assignment(topology, rsu_of_vehicle);

  std::ostringstream detail;
  detail << "fogs=" << join_ids(ids) << " into=" << merged_id;
  events.push_back({now, EventKind::merge, detail.str()});
  return merged_id;
}

DestroyOutcome destroy_fog(FogTopology& topology, ResourceLedger& ledger,
                           int fog_id,
                           std::span<const std::int64_t> pending_message_ids,
                           double now, EventLog& events) {
  auto it = topology.fogs.find(fog_id);
  if (it == topology.fogs.end()) {
    throw std::invalid_argument("destroying a fog that does not exist: id " +
                                std::to_string(fog_id));
  }
  if (!pending_message_ids.empty()) {
    DestroyOutcome out;
    out.pending_message_ids.assign(pending_message_ids.begin(),
                                   pending_message_ids.end());
    return out;
  }
  for (int vid : it->second.member_vehicle_ids) {
    topology.vehicle_to_fog.erase(vid);
  }
  for (int rid : it->second.rsu_ids) {
    topology.rsu_to_fog.erase(rid);
  }
  ledger.release_all(fog_id);
  topology.fogs.erase(it);

  std::ostringstream detail;
  detail << "fog=" << fog_id;
  events.push_back({now, EventKind::destroy, detail.str()});
  return {true, {}};
}

std::size_t region_vehicle_count(const BaseStation& bs,
                                 std::span<const Vehicle> vehicles) {
  std::size_t count = 0;
  for (const Vehicle& v : vehicles) {
    if (distance(v.position, bs.position) <= bs.coverage_radius_m) ++count;
  }
  return count;
}

int create_fog(FogTopology& topology, ResourceLedger& ledger, int bs_id,
               const std::set<int>& members,
               std::span<const int> rsu_of_vehicle, double now) {
  if (members.empty()) {
    throw std::invalid_argument("creating a fog with no members");
  }
  int id = topology.next_fog_id++;
  FogLayer fog;
  fog.id = id;
  fog.base_station_id = bs_id;
  fog.member_vehicle_ids = members;
  fog.created_at = now;
  int units = std::min<int>(static_cast<int>(members.size()),
                            ledger.pool_remaining());
  ledger.allocate(id, units);
  fog.allocated_units = units;
  for (int vid : members) topology.vehicle_to_fog[vid] = id;
  topology.fogs.emplace(id, std::move(fog));
  rebuild_rsu_assignment(topology, rsu_of_vehicle);
  return id;
}

}  // namespace dfcv
