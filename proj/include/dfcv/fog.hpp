#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "dfcv/events.hpp"
#include "dfcv/types.hpp"

namespace dfcv {

/// Cloud-layer bookkeeping of abstract resource units per fog. Every
/// mutation preserves pool_remaining + sum(allocations) == total_pool.
class ResourceLedger {
 public:
  ResourceLedger() = default;
  explicit ResourceLedger(int total_pool);

  int total_pool() const { return total_pool_; }
  int pool_remaining() const { return remaining_; }
  int allocation(int fog_id) const;
  int allocated_total() const { return total_pool_ - remaining_; }

  /// Moves units from the pool to a fog. Over-allocation is rejected.
  void allocate(int fog_id, int units);
  /// Returns units from a fog to the pool. Over-release is rejected.
  void release(int fog_id, int units);

  /// Splits a fog's allocation proportionally to the child member counts;
  /// the rounding remainder goes to child_a.
  void split_allocation(int fog_id, int child_a, int child_b,
                        std::size_t members_a, std::size_t members_b);
  /// Combines the allocations of `fog_ids` into `merged_id`.
  void merge_allocations(std::span<const int> fog_ids, int merged_id);
  /// Releases everything a fog holds and forgets it.
  void release_all(int fog_id);

  const std::map<int, int>& allocations() const { return allocations_; }

 private:
  int total_pool_ = 0;
  int remaining_ = 0;
  std::map<int, int> allocations_;
};

/// Live fog layers plus the vehicle/RSU -> fog maps kept in lockstep
/// with the member sets.
struct FogTopology {
  std::map<int, FogLayer> fogs;
  std::map<int, int> vehicle_to_fog;
  std::map<int, int> rsu_to_fog;
  int next_fog_id = 0;

  int fog_of_vehicle(int vehicle_id) const;  // -1 when unassociated to a fog
  /// Fog ids under one base station, ascending.
  std::vector<int> fogs_of_base_station(int bs_id) const;
  /// Throws std::logic_error with a description when the maps and member
  /// sets disagree or a vehicle appears in two fogs.
  void check_consistent() const;
};

/// Per-vehicle association produced by `associate`: the chosen RSU id (or
/// -1) and the base station it belongs to (or -1).
struct Association {
  std::vector<int> rsu_of_vehicle;
  std::vector<int> bs_of_vehicle;
};

/// Nearest in-range RSU per vehicle, ties broken by lowest RSU id.
/// Vehicles with no RSU in range are left unassociated (-1).
/// `associate` may scan vehicles in parallel; associate_serial is the
/// reference loop.
Association associate(std::span<const Vehicle> vehicles,
                      std::span<const Rsu> rsus);
Association associate_serial(std::span<const Vehicle> vehicles,
                             std::span<const Rsu> rsus);

/// Fog capacity: members connected to the fog over total vehicles in the
/// base station's region. Throws std::domain_error when the region is
/// empty (t_v = 0).
double fog_capacity(std::size_t fog_member_count,
                    std::size_t region_vehicle_count);
double fog_capacity(const FogLayer& fog, std::size_t region_vehicle_count);

enum class SplitReason { distance, capacity };

struct SplitDecision {
  bool split = false;
  SplitReason reason = SplitReason::distance;
};

/// Split predicate: fires when any member is farther than d_min from the
/// sender (first observer), or, checked second, when fog capacity
/// strictly exceeds th_cap. Boundary capacity (f_c == th_cap) does not
/// fire.
SplitDecision should_split(const Vec2& sender_position,
                           std::span<const Vec2> member_positions,
                           double d_min_m, double th_cap,
                           std::size_t region_vehicle_count);

/// Merge predicate for two fogs under the same base station: every
/// cross-pair of members within d_min AND combined capacity at most
/// th_cap. Requiring both keeps merge and split from firing on the same
/// configuration.
bool should_merge(std::span<const Vec2> members_a,
                  std::span<const Vec2> members_b, double d_min_m,
                  double th_cap, std::size_t region_vehicle_count);

struct SplitOutcome {
  bool performed = false;
  int fog_a = -1;
  int fog_b = -1;
};

/// Splits a fog in two. Members are partitioned by their current base
/// station when they span more than one; otherwise (capacity-triggered
/// split) by position median along the road axis. fog_a is the group with
/// the lowest base station id, or the lower-x half. Allocated units are
/// divided proportionally to member counts, remainder to fog_a. A
/// single-member fog cannot split: that is a no-op recorded as a WARN
/// event.
SplitOutcome split_fog(FogTopology& topology, ResourceLedger& ledger,
                       int fog_id, std::span<const int> bs_of_vehicle,
                       std::span<const Vec2> vehicle_positions,
                       std::span<const int> rsu_of_vehicle,
                       SplitReason reason, double now, EventLog& events);

/// Merges fogs (all under one base station) into a new fog holding the
/// union of members and RSUs and the summed allocation. Old ids are
/// retired. Merging fewer than two distinct fogs is rejected.
int merge_fogs(FogTopology& topology, ResourceLedger& ledger,
               std::span<const int> fog_ids,
               std::span<const int> rsu_of_vehicle, double now,
               EventLog& events);

struct DestroyOutcome {
  bool destroyed = false;
  std::vector<std::int64_t> pending_message_ids;  // set when refused
};

/// Destroys a fog once nothing routed through it is still pending: all
/// units return to the pool and members drop their fog association until
/// the next associate pass. Refusal lists the pending message ids.
DestroyOutcome destroy_fog(FogTopology& topology, ResourceLedger& ledger,
                           int fog_id,
                           std::span<const std::int64_t> pending_message_ids,
                           double now, EventLog& events);

/// Creates a fog for a base station from the given members; allocates one
/// unit per member, capped by what the pool still holds.
int create_fog(FogTopology& topology, ResourceLedger& ledger, int bs_id,
               const std::set<int>& members,
               std::span<const int> rsu_of_vehicle, double now);

/// Recomputes rsu_to_fog and every fog's rsu_ids from the member sets: an
/// RSU belongs to the fog that most of its associated member vehicles are
/// in (ties to the lowest fog id).
void rebuild_rsu_assignment(FogTopology& topology,
                            std::span<const int> rsu_of_vehicle);

/// Vehicles inside a base station's coverage disk: the t_v denominator of
/// the capacity ratio.
std::size_t region_vehicle_count(const BaseStation& bs,
                                 std::span<const Vehicle> vehicles);

}  // namespace dfcv
