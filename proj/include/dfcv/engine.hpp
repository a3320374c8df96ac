#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfcv/config.hpp"
#include "dfcv/dissemination.hpp"
#include "dfcv/fog.hpp"
#include "dfcv/metrics.hpp"
#include "dfcv/mobility.hpp"
#include "dfcv/rng.hpp"
#include "dfcv/trace.hpp"
#include "dfcv/types.hpp"

namespace dfcv {

/// Broken internal state detected during a tick. The message carries a
/// diagnostic dump; the CLI maps this to exit code 2.
class InvariantViolation : public std::runtime_error {
 public:
  explicit InvariantViolation(const std::string& what)
      : std::runtime_error(what) {}
};

/// One not-yet-delivered (message, recipient) pair, retried every tick
/// until it delivers or its TTL runs out.
struct PendingAttempt {
  std::int64_t message_id = -1;
  int recipient_id = -1;
  std::size_t record_index = 0;  // into RunLog::deliveries
  int fog_id = -1;               // sender's fog as of the last plan
};

struct WorldState {
  SimConfig config;
  MobilityState mobility;
  std::vector<Rsu> rsus;
  std::vector<BaseStation> stations;
  FogTopology topology;
  ResourceLedger ledger;
  Association assoc;         // refreshed every tick
  Association frozen_assoc;  // t = 0 snapshot, drives the static baseline
  std::vector<Message> messages;
  std::vector<PendingAttempt> pending;
  RunLog log;
  const TraceTimeline* trace = nullptr;  // not owned
  double trace_end_s = 0.0;
  Rng mobility_rng;
  Rng traffic_rng;
  Rng slot_rng;
  std::int64_t tick_index = 0;
  double time_s = 0.0;
  // Time integral behind the report's mean fog size.
  double fog_size_weighted_sum = 0.0;
  double fog_time_total = 0.0;
};

/// Builds the initial world: RSUs every 250 m and a base station every
/// 500 m along the road, vehicles spawned per scenario (or taken from the
/// trace at t = 0), one fog per populated base station, and per-subsystem
/// rng streams derived from the seed by fixed labels. Throws on invalid
/// config or a trace whose vehicle count disagrees with the config.
WorldState init_world(const SimConfig& config,
                      const TraceTimeline* trace = nullptr);

/// Advances one tick: (1) mobility, (2) association, (3) orchestration,
/// (4) message generation, (5) dissemination, (6) radio resolution,
/// (7) TTL expiry, (8) event-log append. Exactly one orchestration pass,
/// never mid-dissemination. With generate_traffic off, phase (4) is
/// skipped; the drain window at the end of a run uses that.
void tick(WorldState& world, bool generate_traffic = true);

struct RunResult {
  RunReport report;
  RunLog log;
};

/// Full run: ticks until sim_duration_s (clipped to the trace span when
/// one is supplied), then drains in-flight traffic without generating
/// more until everything has delivered or expired, destroys the fogs,
/// and distills the report.
RunResult run(const SimConfig& config, const TraceTimeline* trace = nullptr);

}  // namespace dfcv
