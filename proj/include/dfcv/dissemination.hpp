#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfcv/config.hpp"
#include "dfcv/events.hpp"
#include "dfcv/fog.hpp"
#include "dfcv/radio.hpp"
#include "dfcv/rng.hpp"
#include "dfcv/types.hpp"

namespace dfcv {

struct RouteLeg {
  int from_node = -1;
  int to_node = -1;
  LinkKind kind = LinkKind::v2i;
};

struct HandshakePair {
  int bs_a = -1;
  int bs_b = -1;
};

/// Route for one (message, recipient) pair. Legs form a connected path;
/// a handshake (or the cloud detour) bridges the gap between the sender's
/// and the recipient's base station nodes.
struct RoutePlan {
  std::int64_t message_id = -1;
  int recipient_id = -1;
  std::vector<RouteLeg> legs;
  std::vector<HandshakePair> handshakes;
  bool via_cloud = false;
  double cloud_detour_s = 0.0;
};

/// Sum of per-leg delays, plus handshake_delay_s per handshake, plus the
/// cloud detour when taken. Every reported end-to-end delay decomposes
/// into exactly these terms.
double plan_delay(const RoutePlan& plan, const SimConfig& config);

/// Verifies the legs walk from the sender to the recipient, allowing a
/// handshake or cloud detour to bridge base stations. Throws
/// std::logic_error on a broken path.
void check_plan_connected(const RoutePlan& plan, int sender_id);

/// One over-the-air hop and the node expected to receive it. Backhaul
/// legs are wired and carry no check.
struct LegCheck {
  Transmission tx;
  Receiver rx;
};

/// Everything needed to attempt one (message, recipient) delivery during
/// a tick: the analytic route, its total delay, and the radio checks the
/// attempt must survive. Infeasible plans carry a failure note instead.
struct SendPlan {
  RoutePlan route;
  double delay_s = 0.0;
  std::vector<LegCheck> checks;
  int fog_id = -1;  // sender's fog at planning time, -1 when none
  bool feasible = false;
  std::string failure;
};

/// Read-only snapshot of the world as the send operations need it.
/// Vehicles/RSUs/stations are indexed by their ids; association arrays
/// are indexed by vehicle id (-1 = unassociated). For the static-fog
/// baseline the association arrays are the frozen t=0 ones, already
/// filtered to entries still within radio range.
struct WorldView {
  std::span<const Vehicle> vehicles;
  std::span<const Rsu> rsus;
  std::span<const BaseStation> stations;
  std::span<const int> rsu_of_vehicle;
  std::span<const int> bs_of_vehicle;
};

/// Greedy geographic forwarding from sender to recipient over V2V hops:
/// each hop picks the in-range vehicle closest to the recipient and
/// strictly closer than the current holder. Returns the relay ids in hop
/// order (empty = single hop suffices), or nullopt at a local maximum.
std::optional<std::vector<int>> multi_hop_route(
    int sender_id, int recipient_id, std::span<const Vehicle> vehicles,
    double range_m);

/// Protocol driver: plans routes for every recipient of the message.
/// When apply_orchestration is set, first runs the split/merge evaluation
/// for the sender's fog (mutating topology, ledger, and events); the
/// engine runs orchestration as its own phase and passes false here.
std::vector<SendPlan> dfcv_send(const Message& message, FogTopology& topology,
                                ResourceLedger& ledger, const WorldView& world,
                                const SimConfig& config, double now,
                                Rng& slot_rng, EventLog& events,
                                bool apply_orchestration = true);

/// Baseline: identical routing with the frozen t=0 association (the view
/// passed in carries it). No orchestration ever runs.
std::vector<SendPlan> static_fog_send(const Message& message,
                                      const WorldView& world,
                                      const SimConfig& config, double now,
                                      Rng& slot_rng);

/// Baseline: every message detours through the cloud (paying cloud_rtt_s
/// once, never a handshake); no fogs, no multi-hop fallback.
std::vector<SendPlan> cloud_only_send(const Message& message,
                                      const WorldView& world,
                                      const SimConfig& config, double now,
                                      Rng& slot_rng);

/// Resolves a batch of plans jointly: every feasible plan's transmissions
/// interfere with the others' on the shared slot grid. Returns one
/// verdict per plan, in plan order: collided if any leg collided,
/// otherwise out_of_range if any leg was unreachable (infeasible plans
/// report out_of_range too), otherwise delivered. The engine passes a
/// whole tick's plans at once.
std::vector<ReceptionOutcome> resolve_plans(std::span<const SendPlan> plans);

}  // namespace dfcv
