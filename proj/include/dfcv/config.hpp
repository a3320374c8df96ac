#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dfcv {

enum class Scenario { urban, highway };
enum class Protocol { dfcv, static_fog, cloud_only };

std::string to_string(Scenario s);
std::string to_string(Protocol p);
Scenario scenario_from_string(const std::string& s);
Protocol protocol_from_string(const std::string& s);

/// Run parameters. Speeds are configured in mph and converted to m/s at the
/// point of use; everything else is SI.
struct SimConfig {
  double road_length_m = 1000.0;
  int lane_count = 4;
  int vehicle_count = 40;
  double speed_min_mph = 30.0;
  double speed_max_mph = 65.0;
  double transmission_range_m = 300.0;
  int message_size_bytes = 256;
  double data_rate_bps = 2'000'000.0;
  // Maximum-separation split threshold. Defaults to the transmission range
  // when the config file leaves it unset.
  double d_min_m = 300.0;
  double th_cap = 0.8;
  double slot_duration_s = 0.001;
  double handshake_delay_s = 0.002;
  double cloud_rtt_s = 0.05;
  double sim_duration_s = 300.0;
  std::uint64_t seed = 1;
  Scenario scenario = Scenario::urban;
  Protocol protocol = Protocol::dfcv;
  double message_generation_rate = 0.1;  // messages / vehicle / second
  double tick_duration_s = 0.1;
  double message_ttl_s = 10.0;
  int resource_pool_units = 100;

  double speed_min_mps() const;
  double speed_max_mps() const;
};

/// Returns every violated invariant, one human-readable line per violation
/// naming the field and offending value. Empty result means the config is
/// usable as-is.
std::vector<std::string> validate_config(const SimConfig& config);

/// Loads a flat JSON object whose keys mirror SimConfig field names.
/// Unknown keys are hard errors. Missing keys keep their defaults;
/// d_min_m additionally tracks transmission_range_m when absent.
/// Throws std::runtime_error with all problems listed.
SimConfig load_config(const std::string& path);

}  // namespace dfcv
