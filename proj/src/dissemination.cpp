#include "dfcv/dissemination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dfcv/geometry.hpp"

namespace dfcv {

double plan_delay(const RoutePlan& plan, const SimConfig& config) {
  double total = plan.cloud_detour_s;
  for (const RouteLeg& leg : plan.legs) {
    total += hop_delay(config.message_size_bytes, config.data_rate_bps,
                       leg.kind, config.handshake_delay_s, config.cloud_rtt_s);
  }
  total += static_cast<double>(plan.handshakes.size()) *
           config.handshake_delay_s;
  return total;
}

void check_plan_connected(const RoutePlan& plan, int sender_id) {
  if (plan.legs.empty()) {
    throw std::logic_error("route plan has no legs");
  }
  auto bridged = [&](int from, int to) {
    if (plan.via_cloud) return true;  // cloud relays between any stations
    for (const HandshakePair& h : plan.handshakes) {
      if ((bs_node_id(h.bs_a) == from && bs_node_id(h.bs_b) == to) ||
          (bs_node_id(h.bs_a) == to && bs_node_id(h.bs_b) == from)) {
        return true;
      }
    }
    return false;
  };
  int current = sender_id;
  for (const RouteLeg& leg : plan.legs) {
    if (leg.from_node != current &&
        !bridged(current, leg.from_node)) {
      std::ostringstream msg;
      msg << "route plan for message " << plan.message_id
          << " breaks at node " << current << " -> leg from "
          << leg.from_node;
      throw std::logic_error(msg.str());
    }
    current = leg.to_node;
  }
  if (current != plan.recipient_id) {
    std::ostringstream msg;
    msg << "route plan for message " << plan.message_id << " ends at node "
        << current << " instead of recipient " << plan.recipient_id;
    throw std::logic_error(msg.str());
  }
}

std::optional<std::vector<int>> multi_hop_route(
    int sender_id, int recipient_id, std::span<const Vehicle> vehicles,
    double range_m) {
  if (range_m <= 0.0) {
    throw std::invalid_argument("multi-hop range must be positive");
  }
  const Vec2 target = vehicles[static_cast<std::size_t>(recipient_id)].position;
  std::vector<int> relays;
  int current = sender_id;
  while (true) {
    const Vec2 here = vehicles[static_cast<std::size_t>(current)].position;
    if (distance(here, target) <= range_m) return relays;
    double current_to_target = distance(here, target);
    int best = -1;
    double best_to_target = current_to_target;
    for (const Vehicle& v : vehicles) {
      if (v.id == current || v.id == recipient_id) continue;
      if (distance(here, v.position) > range_m) continue;
      double d = distance(v.position, target);
      if (d < best_to_target ||
          (d == best_to_target && best >= 0 && v.id < best)) {
        best_to_target = d;
        best = v.id;
      }
    }
    if (best < 0) return std::nullopt;  // local maximum, no progress
    relays.push_back(best);
    current = best;
  }
}

namespace {

int slot_span_for(const SimConfig& config) {
  double tx = transmission_time(config.message_size_bytes,
                                config.data_rate_bps);
  return std::max(
      1, static_cast<int>(std::ceil(tx / config.slot_duration_s - 1e-12)));
}

int slots_per_tick(const SimConfig& config) {
  return std::max(1, static_cast<int>(std::llround(
                         config.tick_duration_s / config.slot_duration_s)));
}

SendPlan infeasible_plan(const Message& message, int recipient,
                         std::string why) {
  SendPlan plan;
  plan.route.message_id = message.id;
  plan.route.recipient_id = recipient;
  plan.feasible = false;
  plan.failure = std::move(why);
  return plan;
}

/// Assigns consecutive slot windows to the plan's checks, starting at a
/// random slot so concurrent attempts can land on each other.
void place_checks(SendPlan& plan, const SimConfig& config, Rng& slot_rng) {
  const int span = slot_span_for(config);
  const int spt = slots_per_tick(config);
  const int total = span * static_cast<int>(plan.checks.size());
  const int limit = std::max(1, spt - total + 1);
  const int start = static_cast<int>(slot_rng.uniform_int(limit));
  for (std::size_t i = 0; i < plan.checks.size(); ++i) {
    plan.checks[i].tx.start_slot = start + span * static_cast<int>(i);
    plan.checks[i].tx.slot_span = span;
  }
}

SendPlan build_infra_plan(const Message& message, int recipient,
                          const WorldView& world, const SimConfig& config,
                          bool via_cloud) {
  const int sender = message.sender_id;
  const int rsu_s = world.rsu_of_vehicle[static_cast<std::size_t>(sender)];
  const int bs_s = world.bs_of_vehicle[static_cast<std::size_t>(sender)];
  const int rsu_r = world.rsu_of_vehicle[static_cast<std::size_t>(recipient)];
  const int bs_r = world.bs_of_vehicle[static_cast<std::size_t>(recipient)];
  if (rsu_s < 0 || bs_s < 0) {
    return infeasible_plan(message, recipient, "sender-unassociated");
  }
  if (rsu_r < 0 || bs_r < 0) {
    return infeasible_plan(message, recipient, "recipient-unassociated");
  }

  SendPlan plan;
  plan.route.message_id = message.id;
  plan.route.recipient_id = recipient;
  plan.route.legs = {
      {sender, rsu_node_id(rsu_s), LinkKind::v2i},
      {rsu_node_id(rsu_s), bs_node_id(bs_s), LinkKind::backhaul},
      {bs_node_id(bs_r), recipient, LinkKind::v2i},
  };
  if (via_cloud) {
    plan.route.via_cloud = true;
    plan.route.cloud_detour_s = config.cloud_rtt_s;
  } else if (bs_s != bs_r) {
    plan.route.handshakes.push_back({bs_s, bs_r});
  }

  const double range = config.transmission_range_m;
  Transmission up;
  up.transmitter_id = sender;
  up.origin = world.vehicles[static_cast<std::size_t>(sender)].position;
  up.range_m = range;
  up.message_id = message.id;
  Receiver up_rx{rsu_node_id(rsu_s),
                 world.rsus[static_cast<std::size_t>(rsu_s)].position};

  Transmission down;
  down.transmitter_id = bs_node_id(bs_r);
  down.origin = world.stations[static_cast<std::size_t>(bs_r)].position;
  down.range_m = range;
  down.message_id = message.id;
  Receiver down_rx{recipient,
                   world.vehicles[static_cast<std::size_t>(recipient)].position};

  plan.checks = {{up, up_rx}, {down, down_rx}};
  plan.feasible = true;
  return plan;
}

SendPlan build_multihop_plan(const Message& message, int recipient,
                             const WorldView& world,
                             const SimConfig& config) {
  const int sender = message.sender_id;
  auto relays = multi_hop_route(sender, recipient, world.vehicles,
                                config.transmission_range_m);
  if (!relays) {
    return infeasible_plan(message, recipient, "no-multihop-path");
  }
  SendPlan plan;
  plan.route.message_id = message.id;
  plan.route.recipient_id = recipient;
  std::vector<int> chain;
  chain.push_back(sender);
  chain.insert(chain.end(), relays->begin(), relays->end());
  chain.push_back(recipient);
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    plan.route.legs.push_back({chain[i], chain[i + 1], LinkKind::v2i});
    Transmission tx;
    tx.transmitter_id = chain[i];
    tx.origin = world.vehicles[static_cast<std::size_t>(chain[i])].position;
    tx.range_m = config.transmission_range_m;
    tx.message_id = message.id;
    Receiver rx{chain[i + 1],
                world.vehicles[static_cast<std::size_t>(chain[i + 1])].position};
    plan.checks.push_back({tx, rx});
  }
  plan.feasible = true;
  return plan;
}

std::vector<SendPlan> protocol_send(const Message& message,
                                    const WorldView& world,
                                    const SimConfig& config, Rng& slot_rng,
                                    bool allow_multihop, bool via_cloud) {
  std::vector<SendPlan> plans;
  plans.reserve(message.recipient_ids.size());
  for (int recipient : message.recipient_ids) {
    if (recipient == message.sender_id) {
      throw std::invalid_argument(
          "message lists its own sender as a recipient");
    }
    SendPlan plan = build_infra_plan(message, recipient, world, config,
                                     via_cloud);
    if (!plan.feasible && allow_multihop) {
      plan = build_multihop_plan(message, recipient, world, config);
    }
    if (plan.feasible) {
      place_checks(plan, config, slot_rng);
      plan.delay_s = plan_delay(plan.route, config);
      check_plan_connected(plan.route, message.sender_id);
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

/// The protocol's coupled orchestration step: evaluate the sender's fog
/// against the split predicate; otherwise try to merge it with a sibling
/// fog under the same base station.
void orchestrate_sender_fog(const Message& message, FogTopology& topology,
                            ResourceLedger& ledger, const WorldView& world,
                            const SimConfig& config, double now,
                            EventLog& events) {
  const int fid = topology.fog_of_vehicle(message.sender_id);
  if (fid < 0) return;
  const FogLayer& fog = topology.fogs.at(fid);
  if (fog.base_station_id < 0 ||
      static_cast<std::size_t>(fog.base_station_id) >=
          world.stations.size()) {
    return;
  }
  const BaseStation& bs =
      world.stations[static_cast<std::size_t>(fog.base_station_id)];
  const std::size_t region = region_vehicle_count(bs, world.vehicles);

  std::vector<Vec2> positions(world.vehicles.size());
  for (std::size_t i = 0; i < world.vehicles.size(); ++i) {
    positions[i] = world.vehicles[i].position;
  }
  std::vector<Vec2> members;
  members.reserve(fog.member_vehicle_ids.size());
  for (int vid : fog.member_vehicle_ids) {
    members.push_back(positions[static_cast<std::size_t>(vid)]);
  }

  const Vec2 sender_pos =
      positions[static_cast<std::size_t>(message.sender_id)];
  SplitDecision decision = should_split(sender_pos, members, config.d_min_m,
                                        config.th_cap, region);
  if (decision.split) {
    split_fog(topology, ledger, fid, world.bs_of_vehicle, positions,
              world.rsu_of_vehicle, decision.reason, now, events);
    return;
  }
  for (int other : topology.fogs_of_base_station(fog.base_station_id)) {
    if (other == fid) continue;
    const FogLayer& sibling = topology.fogs.at(other);
    std::vector<Vec2> sibling_members;
    sibling_members.reserve(sibling.member_vehicle_ids.size());
    for (int vid : sibling.member_vehicle_ids) {
      sibling_members.push_back(positions[static_cast<std::size_t>(vid)]);
    }
    if (should_merge(members, sibling_members, config.d_min_m, config.th_cap,
                     region)) {
      int pair[2] = {fid, other};
      merge_fogs(topology, ledger, pair, world.rsu_of_vehicle, now, events);
      return;  // one merge per send, mirroring the single else-branch
    }
  }
}

}  // namespace

std::vector<SendPlan> dfcv_send(const Message& message, FogTopology& topology,
                                ResourceLedger& ledger, const WorldView& world,
                                const SimConfig& config, double now,
                                Rng& slot_rng, EventLog& events,
                                bool apply_orchestration) {
  if (apply_orchestration) {
    orchestrate_sender_fog(message, topology, ledger, world, config, now,
                           events);
  }
  std::vector<SendPlan> plans = protocol_send(message, world, config, slot_rng,
                                              /*allow_multihop=*/true,
                                              /*via_cloud=*/false);
  const int fog = topology.fog_of_vehicle(message.sender_id);
  for (SendPlan& plan : plans) plan.fog_id = fog;
  return plans;
}

std::vector<SendPlan> static_fog_send(const Message& message,
                                      const WorldView& world,
                                      const SimConfig& config, double /*now*/,
                                      Rng& slot_rng) {
  return protocol_send(message, world, config, slot_rng,
                       /*allow_multihop=*/true, /*via_cloud=*/false);
}

std::vector<SendPlan> cloud_only_send(const Message& message,
                                      const WorldView& world,
                                      const SimConfig& config, double /*now*/,
                                      Rng& slot_rng) {
  return protocol_send(message, world, config, slot_rng,
                       /*allow_multihop=*/false, /*via_cloud=*/true);
}

std::vector<ReceptionOutcome> resolve_plans(std::span<const SendPlan> plans) {
  std::vector<Transmission> txs;
  std::map<int, Vec2> receiver_pos;
  for (const SendPlan& plan : plans) {
    if (!plan.feasible) continue;
    for (const LegCheck& check : plan.checks) {
      txs.push_back(check.tx);
      receiver_pos.emplace(check.rx.id, check.rx.position);
    }
  }
  std::vector<Receiver> receivers;
  std::map<int, std::size_t> receiver_index;
  for (const auto& [id, pos] : receiver_pos) {
    receiver_index[id] = receivers.size();
    receivers.push_back({id, pos});
  }
  std::vector<ReceptionOutcome> all =
      detect_collisions(txs, receivers);

  std::vector<ReceptionOutcome> out;
  out.reserve(plans.size());
  std::size_t tx_cursor = 0;
  for (const SendPlan& plan : plans) {
    ReceptionOutcome verdict;
    verdict.message_id = plan.route.message_id;
    verdict.receiver_id = plan.route.recipient_id;
    verdict.transmitter_id = -1;
    if (!plan.feasible) {
      verdict.outcome = Reception::out_of_range;
      out.push_back(verdict);
      continue;
    }
    verdict.transmitter_id = plan.checks.front().tx.transmitter_id;
    bool collided = false;
    bool unreachable = false;
    for (const LegCheck& check : plan.checks) {
      std::size_t rx = receiver_index.at(check.rx.id);
      const ReceptionOutcome& leg =
          all[rx * txs.size() + tx_cursor];
      if (leg.outcome == Reception::collided) collided = true;
      if (leg.outcome == Reception::out_of_range) unreachable = true;
      ++tx_cursor;
    }
    verdict.outcome = collided
                          ? Reception::collided
                          : (unreachable ? Reception::out_of_range
                                         : Reception::delivered);
    out.push_back(verdict);
  }
  return out;
}

}  // namespace dfcv
