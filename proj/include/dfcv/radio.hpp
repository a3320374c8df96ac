#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dfcv/geometry.hpp"

namespace dfcv {

enum class LinkKind { v2i, backhaul, cloud };

/// One wireless transmission on the shared slot grid.
struct Transmission {
  int transmitter_id = -1;
  Vec2 origin;
  double range_m = 0.0;
  std::int64_t message_id = 0;
  int start_slot = 0;
  int slot_span = 1;
};

enum class Reception { delivered, collided, out_of_range };

struct ReceptionOutcome {
  std::int64_t message_id = 0;
  int transmitter_id = -1;
  int receiver_id = -1;
  Reception outcome = Reception::out_of_range;
};

struct Receiver {
  int id = -1;
  Vec2 position;
};

/// Unit-disk reachability, boundary inclusive. range must be > 0.
bool in_range(const Vec2& a, const Vec2& b, double range_m);

/// Serialization time of a payload: size_bytes * 8 / data_rate_bps.
/// Both arguments must be positive.
double transmission_time(double size_bytes, double data_rate_bps);

/// Per-hop latency: transmission time plus the fixed cost of the link
/// kind. v2i adds 0.5 ms propagation+processing, backhaul adds the
/// configured handshake component, cloud adds the configured round trip.
double hop_delay(double size_bytes, double data_rate_bps, LinkKind kind,
                 double handshake_delay_s, double cloud_rtt_s);

inline constexpr double kV2iLatencyS = 0.0005;

inline bool slots_overlap(const Transmission& a, const Transmission& b) {
  return a.start_slot < b.start_slot + b.slot_span &&
         b.start_slot < a.start_slot + a.slot_span;
}

/// Slotted collision resolution. For every (transmission, receiver) pair:
/// out_of_range if the receiver lies beyond the transmitter's range;
/// collided if at least one other in-range transmission overlaps it in
/// slots at that receiver; delivered otherwise. No capture effect: every
/// member of an overlapping in-range group collides. Outcomes are ordered
/// receiver-major then transmission order, so the result is a pure
/// function of the inputs.
///
/// detect_collisions may fan the per-receiver scans out across OpenMP
/// threads; detect_collisions_serial is the plain loop kept as the
/// reference implementation.
std::vector<ReceptionOutcome> detect_collisions(
    std::span<const Transmission> transmissions,
    std::span<const Receiver> receivers);
std::vector<ReceptionOutcome> detect_collisions_serial(
    std::span<const Transmission> transmissions,
    std::span<const Receiver> receivers);

}  // namespace dfcv
