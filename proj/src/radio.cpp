#include "dfcv/radio.hpp"

#include <stdexcept>

namespace dfcv {

bool in_range(const Vec2& a, const Vec2& b, double range_m) {
  if (!(range_m > 0.0)) {
    throw std::invalid_argument("in_range requires range > 0");
  }
  return distance(a, b) <= range_m;
}

double transmission_time(double size_bytes, double data_rate_bps) {
  if (!(size_bytes > 0.0) || !(data_rate_bps > 0.0)) {
    throw std::invalid_argument(
        "transmission_time requires positive size and rate");
  }
  return size_bytes * 8.0 / data_rate_bps;
}

double hop_delay(double size_bytes, double data_rate_bps, LinkKind kind,
                 double handshake_delay_s, double cloud_rtt_s) {
  const double tx = transmission_time(size_bytes, data_rate_bps);
  switch (kind) {
    case LinkKind::v2i: return tx + kV2iLatencyS;
    case LinkKind::backhaul: return tx + handshake_delay_s;
    case LinkKind::cloud: return tx + cloud_rtt_s;
  }
  throw std::invalid_argument("unknown link kind");
}

namespace {

inline void resolve_receiver(std::span<const Transmission> transmissions,
                             const Receiver& receiver,
                             ReceptionOutcome* out) {
  const std::size_t n = transmissions.size();
  // Which transmissions reach this receiver at all.
  std::vector<bool> reachable(n);
  for (std::size_t t = 0; t < n; ++t) {
    reachable[t] = distance(transmissions[t].origin, receiver.position) <=
                   transmissions[t].range_m;
  }
  for (std::size_t t = 0; t < n; ++t) {
    Reception outcome;
    if (!reachable[t]) {
      outcome = Reception::out_of_range;
    } else {
      outcome = Reception::delivered;
      for (std::size_t u = 0; u < n; ++u) {
        if (u == t || !reachable[u]) continue;
        if (slots_overlap(transmissions[t], transmissions[u])) {
          outcome = Reception::collided;
          break;
        }
      }
    }
    out[t] = {transmissions[t].message_id, transmissions[t].transmitter_id,
              receiver.id, outcome};
  }
}

}  // namespace

std::vector<ReceptionOutcome> detect_collisions_serial(
    std::span<const Transmission> transmissions,
    std::span<const Receiver> receivers) {
  std::vector<ReceptionOutcome> outcomes(transmissions.size() *
                                         receivers.size());
  for (std::size_t r = 0; r < receivers.size(); ++r) {
    resolve_receiver(transmissions, receivers[r],
                     outcomes.data() + r * transmissions.size());
  }
  return outcomes;
}

std::vector<ReceptionOutcome> detect_collisions(
    std::span<const Transmission> transmissions,
    std::span<const Receiver> receivers) {
  const std::size_t num_t = transmissions.size();
  const std::size_t num_r = receivers.size();
  std::vector<ReceptionOutcome> outcomes(num_t * num_r);
  // Receivers are independent and each one writes its own output block,
  // so the parallel result is identical to the serial one.
  const long long work = static_cast<long long>(num_t) * num_t * num_r;
#pragma omp parallel for schedule(static) if (work > 1 << 16)
  for (long long r = 0; r < static_cast<long long>(num_r); ++r) {
    resolve_receiver(transmissions, receivers[r],
                     outcomes.data() + r * num_t);
  }
  return outcomes;
}

}  // namespace dfcv
