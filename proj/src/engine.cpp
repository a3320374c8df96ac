#include "dfcv/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

#include "dfcv/geometry.hpp"
#include "dfcv/radio.hpp"

namespace dfcv {

namespace {

constexpr double kRsuSpacingM = 250.0;
constexpr double kBsSpacingM = 500.0;
constexpr double kRsuLaneOffsetM = -5.0;
constexpr double kBsLaneOffsetM = -10.0;

std::vector<Vec2> positions_of(const std::vector<Vehicle>& vehicles) {
  std::vector<Vec2> out(vehicles.size());
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    out[i] = vehicles[i].position;
  }
  return out;
}

std::string diagnostic_dump(const WorldState& world, const std::string& why) {
  std::ostringstream out;
  out << why << " [tick=" << world.tick_index << " t=" << world.time_s
      << " fogs=" << world.topology.fogs.size()
      << " pool=" << world.ledger.pool_remaining() << '/'
      << world.ledger.total_pool()
      << " pending=" << world.pending.size()
      << " messages=" << world.messages.size() << ']';
  for (const auto& [fid, fog] : world.topology.fogs) {
    out << " fog" << fid << "(bs=" << fog.base_station_id
        << " members=" << fog.member_vehicle_ids.size()
        << " units=" << fog.allocated_units << ')';
  }
  return out.str();
}

void check_tick_invariants(const WorldState& world) {
  try {
    world.topology.check_consistent();
  } catch (const std::logic_error& e) {
    throw InvariantViolation(
        diagnostic_dump(world, std::string("fog topology broken: ") +
                                   e.what()));
  }
  if (world.ledger.pool_remaining() + world.ledger.allocated_total() !=
      world.ledger.total_pool()) {
    throw InvariantViolation(
        diagnostic_dump(world, "resource ledger lost conservation"));
  }
  for (const auto& [fid, fog] : world.topology.fogs) {
    if (fog.allocated_units != world.ledger.allocation(fid)) {
      std::ostringstream why;
      why << "fog " << fid << " caches " << fog.allocated_units
          << " units but the ledger holds " << world.ledger.allocation(fid);
      throw InvariantViolation(diagnostic_dump(world, why.str()));
    }
  }
}

std::set<int> member_base_stations(const FogLayer& fog,
                                   const Association& assoc) {
  std::set<int> out;
  for (int vid : fog.member_vehicle_ids) {
    out.insert(assoc.bs_of_vehicle[static_cast<std::size_t>(vid)]);
  }
  return out;
}

/// Orchestration phase for the dfcv protocol: a structural pass keeping
/// fog membership consistent with the current association, then the
/// split/merge predicate evaluations, then destruction of drained fogs.
void orchestrate(WorldState& world, double now, EventLog& events) {
  FogTopology& topo = world.topology;
  const SimConfig& c = world.config;
  const std::vector<Vehicle>& vehicles = world.mobility.vehicles;
  const Association& assoc = world.assoc;
  const std::vector<Vec2> positions = positions_of(vehicles);

  // Members that lost radio association leave their fog (units stay with
  // the fog until it is destroyed).
  {
    std::vector<int> fog_ids;
    for (const auto& [fid, fog] : topo.fogs) fog_ids.push_back(fid);
    for (int fid : fog_ids) {
      FogLayer& fog = topo.fogs.at(fid);
      std::vector<int> leaving;
      for (int vid : fog.member_vehicle_ids) {
        if (assoc.bs_of_vehicle[static_cast<std::size_t>(vid)] < 0) {
          leaving.push_back(vid);
        }
      }
      for (int vid : leaving) {
        fog.member_vehicle_ids.erase(vid);
        topo.vehicle_to_fog.erase(vid);
      }
    }
  }

  // A fog whose members all moved under one new base station migrates
  // silently; a fog spanning several base stations splits (the divergence
  // case; reason recorded as distance).
  {
    std::deque<int> worklist;
    for (const auto& [fid, fog] : topo.fogs) {
      if (!fog.member_vehicle_ids.empty()) worklist.push_back(fid);
    }
    while (!worklist.empty()) {
      int fid = worklist.front();
      worklist.pop_front();
      auto it = topo.fogs.find(fid);
      if (it == topo.fogs.end() || it->second.member_vehicle_ids.empty()) {
        continue;
      }
      std::set<int> bss = member_base_stations(it->second, assoc);
      if (bss.size() == 1) {
        it->second.base_station_id = *bss.begin();
        continue;
      }
      SplitOutcome out =
          split_fog(topo, world.ledger, fid, assoc.bs_of_vehicle, positions,
                    assoc.rsu_of_vehicle, SplitReason::distance, now, events);
      if (out.performed) worklist.push_back(out.fog_b);
    }
  }

  // Associated vehicles without a fog join the nearest fog of their base
  // station (by member centroid, ties to the lowest fog id); base
  // stations with vehicles but no fog get a fresh one.
  {
    std::map<int, std::set<int>> newcomers_by_bs;
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
      const int vid = vehicles[i].id;
      const int bs = assoc.bs_of_vehicle[i];
      if (bs < 0 || topo.fog_of_vehicle(vid) >= 0) continue;
      std::vector<int> candidates = topo.fogs_of_base_station(bs);
      if (candidates.empty()) {
        newcomers_by_bs[bs].insert(vid);
        continue;
      }
      int best = -1;
      double best_dist = std::numeric_limits<double>::infinity();
      for (int fid : candidates) {
        const FogLayer& fog = topo.fogs.at(fid);
        if (fog.member_vehicle_ids.empty()) continue;
        Vec2 centroid{0.0, 0.0};
        for (int m : fog.member_vehicle_ids) {
          centroid.x += positions[static_cast<std::size_t>(m)].x;
          centroid.y += positions[static_cast<std::size_t>(m)].y;
        }
        const double n = static_cast<double>(fog.member_vehicle_ids.size());
        centroid.x /= n;
        centroid.y /= n;
        const double d = distance(positions[i], centroid);
        if (d < best_dist) {
          best_dist = d;
          best = fid;
        }
      }
      if (best < 0) {
        newcomers_by_bs[bs].insert(vid);
        continue;
      }
      FogLayer& fog = topo.fogs.at(best);
      fog.member_vehicle_ids.insert(vid);
      topo.vehicle_to_fog[vid] = best;
      if (world.ledger.pool_remaining() > 0) {
        world.ledger.allocate(best, 1);
        fog.allocated_units = world.ledger.allocation(best);
      }
    }
    for (const auto& [bs, members] : newcomers_by_bs) {
      create_fog(topo, world.ledger, bs, members, assoc.rsu_of_vehicle, now);
    }
  }

  rebuild_rsu_assignment(topo, assoc.rsu_of_vehicle);

  // Drained fogs are destroyed once nothing pending routes through them.
  {
    std::vector<int> fog_ids;
    for (const auto& [fid, fog] : topo.fogs) {
      if (fog.member_vehicle_ids.empty()) fog_ids.push_back(fid);
    }
    for (int fid : fog_ids) {
      std::vector<std::int64_t> pending_ids;
      for (const PendingAttempt& att : world.pending) {
        if (att.fog_id == fid) pending_ids.push_back(att.message_id);
      }
      destroy_fog(topo, world.ledger, fid, pending_ids, now, events);
    }
  }

  // Region sizes for the capacity ratio, one per populated base station.
  std::map<int, std::size_t> region_of_bs;
  auto region_for = [&](int bs_id) {
    auto it = region_of_bs.find(bs_id);
    if (it != region_of_bs.end()) return it->second;
    std::size_t region = region_vehicle_count(
        world.stations[static_cast<std::size_t>(bs_id)], vehicles);
    region_of_bs.emplace(bs_id, region);
    return region;
  };

  // Split evaluations: the lowest-id member observes its fog.
  {
    std::vector<int> fog_ids;
    for (const auto& [fid, fog] : topo.fogs) fog_ids.push_back(fid);
    for (int fid : fog_ids) {
      auto it = topo.fogs.find(fid);
      if (it == topo.fogs.end() || it->second.member_vehicle_ids.empty()) {
        continue;
      }
      const FogLayer& fog = it->second;
      const std::size_t region = region_for(fog.base_station_id);
      const double f_c = fog_capacity(fog.member_vehicle_ids.size(), region);
      world.log.capacity_samples.push_back(f_c);
      if (!(f_c >= 0.0 && f_c <= 1.0)) {
        std::ostringstream why;
        why << "fog " << fid << " capacity " << f_c << " escaped [0,1]";
        throw InvariantViolation(diagnostic_dump(world, why.str()));
      }
      const int sender = *fog.member_vehicle_ids.begin();
      std::vector<Vec2> members;
      members.reserve(fog.member_vehicle_ids.size());
      for (int vid : fog.member_vehicle_ids) {
        members.push_back(positions[static_cast<std::size_t>(vid)]);
      }
      SplitDecision decision = should_split(
          positions[static_cast<std::size_t>(sender)], members, c.d_min_m,
          c.th_cap, region);
      if (decision.split) {
        split_fog(topo, world.ledger, fid, assoc.bs_of_vehicle, positions,
                  assoc.rsu_of_vehicle, decision.reason, now, events);
      }
    }
  }

  // Merge evaluations per base station, to fixpoint. The conjunction in
  // should_merge keeps freshly split fogs from re-merging immediately.
  for (const BaseStation& bs : world.stations) {
    bool merged = true;
    while (merged) {
      merged = false;
      std::vector<int> ids = topo.fogs_of_base_station(bs.id);
      for (std::size_t i = 0; i + 1 < ids.size() && !merged; ++i) {
        for (std::size_t j = i + 1; j < ids.size() && !merged; ++j) {
          const FogLayer& fa = topo.fogs.at(ids[i]);
          const FogLayer& fb = topo.fogs.at(ids[j]);
          if (fa.member_vehicle_ids.empty() ||
              fb.member_vehicle_ids.empty()) {
            continue;
          }
          const std::size_t region = region_for(bs.id);
          world.log.capacity_samples.push_back(
              fog_capacity(fa.member_vehicle_ids.size() +
                               fb.member_vehicle_ids.size(),
                           region));
          std::vector<Vec2> ma;
          std::vector<Vec2> mb;
          for (int vid : fa.member_vehicle_ids) {
            ma.push_back(positions[static_cast<std::size_t>(vid)]);
          }
          for (int vid : fb.member_vehicle_ids) {
            mb.push_back(positions[static_cast<std::size_t>(vid)]);
          }
          if (should_merge(ma, mb, c.d_min_m, c.th_cap, region)) {
            int pair[2] = {ids[i], ids[j]};
            merge_fogs(topo, world.ledger, pair, assoc.rsu_of_vehicle, now,
                       events);
            merged = true;
          }
        }
      }
    }
  }
}

WorldView make_view(const WorldState& world, const Association& assoc) {
  WorldView view;
  view.vehicles = world.mobility.vehicles;
  view.rsus = world.rsus;
  view.stations = world.stations;
  view.rsu_of_vehicle = assoc.rsu_of_vehicle;
  view.bs_of_vehicle = assoc.bs_of_vehicle;
  return view;
}

/// Frozen association restricted to entries still within radio range of
/// their t = 0 RSU; a vehicle that drifted away is effectively
/// unassociated and falls back to multi-hop.
Association effective_static_assoc(const WorldState& world) {
  Association eff = world.frozen_assoc;
  const std::vector<Vehicle>& vehicles = world.mobility.vehicles;
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    const int rsu = eff.rsu_of_vehicle[i];
    if (rsu < 0) continue;
    if (!in_range(vehicles[i].position,
                  world.rsus[static_cast<std::size_t>(rsu)].position,
                  world.config.transmission_range_m)) {
      eff.rsu_of_vehicle[i] = -1;
      eff.bs_of_vehicle[i] = -1;
    }
  }
  return eff;
}

void erase_from_buffer(Vehicle& vehicle, std::int64_t message_id) {
  auto& buf = vehicle.buffer;
  buf.erase(std::remove(buf.begin(), buf.end(), message_id), buf.end());
}

}  // namespace

WorldState init_world(const SimConfig& config, const TraceTimeline* trace) {
  {
    std::vector<std::string> problems = validate_config(config);
    if (!problems.empty()) {
      std::ostringstream msg;
      msg << "invalid config:";
      for (const std::string& p : problems) msg << ' ' << p << ';';
      throw std::invalid_argument(msg.str());
    }
  }

  WorldState world;
  world.config = config;

  const double L = config.road_length_m;
  const int rsu_count = std::max(1, static_cast<int>(L / kRsuSpacingM));
  const double rsu_spacing = L / rsu_count;
  const int bs_count = std::max(1, static_cast<int>(L / kBsSpacingM));
  const double bs_spacing = L / bs_count;

  for (int i = 0; i < bs_count; ++i) {
    BaseStation bs;
    bs.id = i;
    bs.position = {(i + 0.5) * bs_spacing, kBsLaneOffsetM};
    world.stations.push_back(bs);
  }
  for (int i = 0; i < rsu_count; ++i) {
    Rsu rsu;
    rsu.id = i;
    rsu.position = {(i + 0.5) * rsu_spacing, kRsuLaneOffsetM};
    rsu.range_m = config.transmission_range_m;
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const BaseStation& bs : world.stations) {
      const double d = distance(rsu.position, bs.position);
      if (d < best_dist) {
        best_dist = d;
        best = bs.id;
      }
    }
    rsu.base_station_id = best;
    world.stations[static_cast<std::size_t>(best)].rsu_ids.insert(rsu.id);
    world.rsus.push_back(rsu);
  }
  for (BaseStation& bs : world.stations) {
    double coverage = config.transmission_range_m;
    for (int rid : bs.rsu_ids) {
      const Rsu& rsu = world.rsus[static_cast<std::size_t>(rid)];
      coverage = std::max(coverage,
                          distance(bs.position, rsu.position) + rsu.range_m);
    }
    // +1 m of slack so every associated vehicle is strictly inside the
    // region disk and the capacity ratio can never exceed 1.
    bs.coverage_radius_m = coverage + 1.0;
  }

  if (trace != nullptr) {
    if (trace->vehicle_count() != config.vehicle_count) {
      std::ostringstream msg;
      msg << "trace provides " << trace->vehicle_count()
          << " vehicles but the config expects " << config.vehicle_count;
      throw std::invalid_argument(msg.str());
    }
    world.trace = trace;
    world.trace_end_s = std::numeric_limits<double>::infinity();
    MobilityState m;
    m.road_length_m = L;
    m.speed_min_mps = config.speed_min_mps();
    m.speed_max_mps = config.speed_max_mps();
    for (int i = 0; i < config.vehicle_count; ++i) {
      TracePoint p = position_at(*trace, i, 0.0);
      Vehicle v;
      v.id = i;
      v.position = p.position;
      v.speed_mps = p.speed_mps;
      v.lane = p.lane;
      m.vehicles.push_back(v);
      m.base_speed_mps.push_back(p.speed_mps);
      world.trace_end_s = std::min(world.trace_end_s, trace->span_end(i));
    }
    world.mobility = std::move(m);
  } else {
    Rng spawn_rng = Rng::labeled(config.seed, "spawn");
    world.mobility = config.scenario == Scenario::urban
                         ? spawn_urban(config, spawn_rng)
                         : spawn_highway(config, spawn_rng);
  }

  world.mobility_rng = Rng::labeled(config.seed, "mobility");
  world.traffic_rng = Rng::labeled(config.seed, "traffic");
  world.slot_rng = Rng::labeled(config.seed, "slots");

  world.assoc = associate(world.mobility.vehicles, world.rsus);
  world.frozen_assoc = world.assoc;

  world.ledger = ResourceLedger(config.resource_pool_units);
  if (config.protocol != Protocol::cloud_only) {
    std::map<int, std::set<int>> members_by_bs;
    for (std::size_t i = 0; i < world.mobility.vehicles.size(); ++i) {
      const int bs = world.assoc.bs_of_vehicle[i];
      if (bs >= 0) members_by_bs[bs].insert(world.mobility.vehicles[i].id);
    }
    for (const auto& [bs, members] : members_by_bs) {
      create_fog(world.topology, world.ledger, bs, members,
                 world.assoc.rsu_of_vehicle, 0.0);
    }
  }
  check_tick_invariants(world);
  return world;
}

void tick(WorldState& world, bool generate_traffic) {
  const SimConfig& c = world.config;
  const double dt = c.tick_duration_s;
  const double now = world.time_s + dt;
  std::vector<Vehicle>& vehicles = world.mobility.vehicles;

  // (1) mobility
  if (world.trace != nullptr) {
    const double t = std::min(now, world.trace_end_s);
    for (Vehicle& v : vehicles) {
      TracePoint p = position_at(*world.trace, v.id, t);
      v.position = p.position;
      v.speed_mps = p.speed_mps;
      v.lane = p.lane;
    }
    world.mobility.current_time = now;
  } else if (!vehicles.empty()) {
    if (c.scenario == Scenario::urban) {
      step_urban(world.mobility, dt, world.mobility_rng);
    } else {
      step_highway(world.mobility, dt, world.mobility_rng);
    }
  } else {
    world.mobility.current_time += dt;
  }
  world.time_s = now;
  ++world.tick_index;

  // (2) association
  world.assoc = associate(vehicles, world.rsus);

  // (3) orchestration, the only phase allowed to mutate fogs
  EventLog tick_events;
  if (c.protocol == Protocol::dfcv) {
    orchestrate(world, now, tick_events);
  }
  if (!world.topology.fogs.empty()) {
    std::size_t members = 0;
    for (const auto& [fid, fog] : world.topology.fogs) {
      members += fog.member_vehicle_ids.size();
    }
    world.fog_size_weighted_sum +=
        dt * static_cast<double>(members) /
        static_cast<double>(world.topology.fogs.size());
    world.fog_time_total += dt;
  }
  const std::size_t events_after_orchestration = tick_events.size();

  // (4) Poisson traffic, one labeled stream for the whole phase
  const double lambda = generate_traffic ? c.message_generation_rate * dt : 0.0;
  const int n = static_cast<int>(vehicles.size());
  if (n >= 2 && lambda > 0.0) {
    for (int v = 0; v < n; ++v) {
      const int count = world.traffic_rng.poisson(lambda);
      for (int j = 0; j < count; ++j) {
        int r = static_cast<int>(
            world.traffic_rng.uniform_int(static_cast<std::uint64_t>(n - 1)));
        if (r >= v) ++r;  // uniform over the other vehicles
        Message msg;
        msg.id = static_cast<std::int64_t>(world.messages.size());
        msg.sender_id = v;
        msg.recipient_ids = {r};
        msg.size_bytes = c.message_size_bytes;
        msg.created_at = now;
        PendingAttempt att;
        att.message_id = msg.id;
        att.recipient_id = r;
        att.record_index = world.log.deliveries.size();
        att.fog_id = world.topology.fog_of_vehicle(v);
        world.log.deliveries.push_back({msg.id, r, now, -1.0});
        world.pending.push_back(att);
        vehicles[static_cast<std::size_t>(v)].buffer.push_back(msg.id);
        world.messages.push_back(std::move(msg));
      }
    }
  }

  // (5) dissemination: plan every pending attempt against this tick's world
  std::vector<SendPlan> plans;
  plans.reserve(world.pending.size());
  {
    const Association static_assoc = c.protocol == Protocol::static_fog
                                         ? effective_static_assoc(world)
                                         : Association{};
    const WorldView view = c.protocol == Protocol::static_fog
                               ? make_view(world, static_assoc)
                               : make_view(world, world.assoc);
    for (PendingAttempt& att : world.pending) {
      Message probe =
          world.messages[static_cast<std::size_t>(att.message_id)];
      probe.recipient_ids = {att.recipient_id};
      std::vector<SendPlan> planned;
      switch (c.protocol) {
        case Protocol::dfcv:
          planned = dfcv_send(probe, world.topology, world.ledger, view, c,
                              now, world.slot_rng, tick_events,
                              /*apply_orchestration=*/false);
          break;
        case Protocol::static_fog:
          planned = static_fog_send(probe, view, c, now, world.slot_rng);
          break;
        case Protocol::cloud_only:
          planned = cloud_only_send(probe, view, c, now, world.slot_rng);
          break;
      }
      if (c.protocol == Protocol::dfcv) att.fog_id = planned.front().fog_id;
      plans.push_back(std::move(planned.front()));
    }
  }

  // (6) radio resolution over the tick's combined transmissions
  std::vector<ReceptionOutcome> verdicts = resolve_plans(plans);
  if (tick_events.size() != events_after_orchestration) {
    throw InvariantViolation(diagnostic_dump(
        world, "orchestration event appeared during dissemination"));
  }
  {
    std::vector<PendingAttempt> still_pending;
    still_pending.reserve(world.pending.size());
    for (std::size_t i = 0; i < world.pending.size(); ++i) {
      const PendingAttempt& att = world.pending[i];
      const SendPlan& plan = plans[i];
      if (plan.feasible) {
        switch (verdicts[i].outcome) {
          case Reception::delivered:
            ++world.log.receptions.delivered;
            break;
          case Reception::collided:
            ++world.log.receptions.collided;
            break;
          case Reception::out_of_range:
            ++world.log.receptions.out_of_range;
            break;
        }
      }
      if (plan.feasible && verdicts[i].outcome == Reception::delivered) {
        const double delivered_at = now + plan.delay_s;
        Message& msg =
            world.messages[static_cast<std::size_t>(att.message_id)];
        if (delivered_at < msg.created_at) {
          throw InvariantViolation(diagnostic_dump(
              world, "delivery stamped before message creation"));
        }
        msg.delivered_at[att.recipient_id] = delivered_at;
        msg.hop_count[att.recipient_id] =
            static_cast<int>(plan.route.legs.size());
        world.log.deliveries[att.record_index].delivered_at = delivered_at;
        erase_from_buffer(vehicles[static_cast<std::size_t>(msg.sender_id)],
                          msg.id);
      } else {
        still_pending.push_back(att);
      }
    }
    world.pending = std::move(still_pending);
  }

  // (7) TTL expiry
  {
    std::vector<PendingAttempt> alive;
    alive.reserve(world.pending.size());
    for (const PendingAttempt& att : world.pending) {
      const Message& msg =
          world.messages[static_cast<std::size_t>(att.message_id)];
      if (now - msg.created_at >= c.message_ttl_s - 1e-9) {
        erase_from_buffer(vehicles[static_cast<std::size_t>(msg.sender_id)],
                          msg.id);
      } else {
        alive.push_back(att);
      }
    }
    world.pending = std::move(alive);
  }

  // (8) event-log append
  for (Event& e : tick_events) world.log.events.push_back(std::move(e));

  check_tick_invariants(world);
}

RunResult run(const SimConfig& config, const TraceTimeline* trace) {
  WorldState world = init_world(config, trace);
  const double dt = config.tick_duration_s;
  double horizon = config.sim_duration_s;
  if (trace != nullptr) horizon = std::min(horizon, world.trace_end_s);

  while (world.time_s + dt <= horizon + 1e-9) {
    tick(world);
  }

  // Drain: no new traffic past the horizon; what is in flight retries
  // until it delivers or its TTL expires, so the window below is bounded.
  const int max_drain_ticks =
      static_cast<int>(std::ceil(config.message_ttl_s / dt)) + 2;
  for (int i = 0; i < max_drain_ticks && !world.pending.empty(); ++i) {
    tick(world, /*generate_traffic=*/false);
  }
  // The TTL bound makes leftovers unreachable; clear defensively anyway.
  for (const PendingAttempt& att : world.pending) {
    Message& msg = world.messages[static_cast<std::size_t>(att.message_id)];
    erase_from_buffer(
        world.mobility.vehicles[static_cast<std::size_t>(msg.sender_id)],
        msg.id);
  }
  world.pending.clear();
  {
    std::vector<int> fog_ids;
    for (const auto& [fid, fog] : world.topology.fogs) fog_ids.push_back(fid);
    EventLog final_events;
    for (int fid : fog_ids) {
      destroy_fog(world.topology, world.ledger, fid, {}, world.time_s,
                  final_events);
    }
    for (Event& e : final_events) world.log.events.push_back(std::move(e));
  }
  check_tick_invariants(world);

  world.log.mean_fog_member_count =
      world.fog_time_total > 0.0
          ? world.fog_size_weighted_sum / world.fog_time_total
          : 0.0;

  RunResult result;
  result.report = compute_report(world.log, config);
  result.log = std::move(world.log);
  return result;
}

}  // namespace dfcv
