#include "dfcv/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dfcv/geometry.hpp"
#include "json.hpp"

namespace dfcv {

double SimConfig::speed_min_mps() const { return mph_to_mps(speed_min_mph); }
double SimConfig::speed_max_mps() const { return mph_to_mps(speed_max_mph); }

std::string to_string(Scenario s) {
  return s == Scenario::urban ? "urban" : "highway";
}

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::dfcv: return "dfcv";
    case Protocol::static_fog: return "static-fog";
    case Protocol::cloud_only: return "cloud-only";
  }
  return "dfcv";
}

Scenario scenario_from_string(const std::string& s) {
  if (s == "urban") return Scenario::urban;
  if (s == "highway") return Scenario::highway;
  throw std::invalid_argument("unknown scenario '" + s +
                              "' (expected urban|highway)");
}

Protocol protocol_from_string(const std::string& s) {
  if (s == "dfcv") return Protocol::dfcv;
  if (s == "static-fog") return Protocol::static_fog;
  if (s == "cloud-only") return Protocol::cloud_only;
  throw std::invalid_argument(
      "unknown protocol '" + s + "' (expected dfcv|static-fog|cloud-only)");
}

namespace {

template <typename T>
void require_positive(std::vector<std::string>& errors, const char* field,
                      T value) {
  if (!(value > T{0})) {
    std::ostringstream os;
    os << field << " must be > 0 (got " << value << ")";
    errors.push_back(os.str());
  }
}

}  // namespace

std::vector<std::string> validate_config(const SimConfig& c) {
  std::vector<std::string> errors;
  require_positive(errors, "road_length_m", c.road_length_m);
  require_positive(errors, "lane_count", c.lane_count);
  if (c.vehicle_count < 2) {
    errors.push_back("vehicle_count must be >= 2 (got " +
                     std::to_string(c.vehicle_count) + ")");
  }
  require_positive(errors, "speed_min_mph", c.speed_min_mph);
  if (c.speed_max_mph < c.speed_min_mph) {
    std::ostringstream os;
    os << "speed band invalid: speed_max_mph " << c.speed_max_mph
       << " < speed_min_mph " << c.speed_min_mph;
    errors.push_back(os.str());
  }
  require_positive(errors, "transmission_range_m", c.transmission_range_m);
  require_positive(errors, "message_size_bytes", c.message_size_bytes);
  require_positive(errors, "data_rate_bps", c.data_rate_bps);
  require_positive(errors, "d_min_m", c.d_min_m);
  if (!(c.th_cap > 0.0 && c.th_cap <= 1.0)) {
    std::ostringstream os;
    os << "th_cap must be in (0,1] (got " << c.th_cap << ")";
    errors.push_back(os.str());
  }
  require_positive(errors, "slot_duration_s", c.slot_duration_s);
  if (c.handshake_delay_s < 0.0) {
    errors.push_back("handshake_delay_s must be >= 0 (got " +
                     std::to_string(c.handshake_delay_s) + ")");
  }
  if (c.cloud_rtt_s < 0.0) {
    errors.push_back("cloud_rtt_s must be >= 0 (got " +
                     std::to_string(c.cloud_rtt_s) + ")");
  }
  // sim_duration_s 0 is a legal degenerate run (no ticks, empty report).
  if (c.sim_duration_s < 0.0) {
    errors.push_back("sim_duration_s must be >= 0 (got " +
                     std::to_string(c.sim_duration_s) + ")");
  }
  if (c.message_generation_rate < 0.0) {
    errors.push_back("message_generation_rate must be >= 0 (got " +
                     std::to_string(c.message_generation_rate) + ")");
  }
  require_positive(errors, "tick_duration_s", c.tick_duration_s);
  require_positive(errors, "message_ttl_s", c.message_ttl_s);
  require_positive(errors, "resource_pool_units", c.resource_pool_units);
  return errors;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": not valid JSON: " + e.what());
  }
  if (!j.is_object()) {
    throw std::runtime_error(path + ": config must be a flat JSON object");
  }

  SimConfig c;
  bool d_min_set = false;
  bool range_set = false;
  std::vector<std::string> errors;

  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "road_length_m") c.road_length_m = value.get<double>();
      else if (key == "lane_count") c.lane_count = value.get<int>();
      else if (key == "vehicle_count") c.vehicle_count = value.get<int>();
      else if (key == "speed_min_mph") c.speed_min_mph = value.get<double>();
      else if (key == "speed_max_mph") c.speed_max_mph = value.get<double>();
      else if (key == "transmission_range_m") {
        c.transmission_range_m = value.get<double>();
        range_set = true;
      } else if (key == "message_size_bytes") {
        c.message_size_bytes = value.get<int>();
      } else if (key == "data_rate_bps") c.data_rate_bps = value.get<double>();
      else if (key == "d_min_m") {
        c.d_min_m = value.get<double>();
        d_min_set = true;
      } else if (key == "th_cap") c.th_cap = value.get<double>();
      else if (key == "slot_duration_s") c.slot_duration_s = value.get<double>();
      else if (key == "handshake_delay_s") {
        c.handshake_delay_s = value.get<double>();
      } else if (key == "cloud_rtt_s") c.cloud_rtt_s = value.get<double>();
      else if (key == "sim_duration_s") c.sim_duration_s = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "scenario") {
        c.scenario = scenario_from_string(value.get<std::string>());
      } else if (key == "protocol") {
        c.protocol = protocol_from_string(value.get<std::string>());
      } else if (key == "message_generation_rate") {
        c.message_generation_rate = value.get<double>();
      } else if (key == "tick_duration_s") {
        c.tick_duration_s = value.get<double>();
      } else if (key == "message_ttl_s") c.message_ttl_s = value.get<double>();
      else if (key == "resource_pool_units") {
        c.resource_pool_units = value.get<int>();
      } else {
        errors.push_back("unknown config key: \"" + key + "\"");
      }
    } catch (const nlohmann::json::exception&) {
      errors.push_back("config key \"" + key + "\" has the wrong type");
    } catch (const std::invalid_argument& e) {
      errors.push_back(e.what());
    }
  }

  if (!d_min_set && range_set) c.d_min_m = c.transmission_range_m;

  auto violations = validate_config(c);
  errors.insert(errors.end(), violations.begin(), violations.end());
  if (!errors.empty()) {
    std::string msg = path + ": invalid config:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw std::runtime_error(msg);
  }
  return c;
}

}  // namespace dfcv
