#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dfcv/config.hpp"
#include "dfcv/events.hpp"

namespace dfcv {

/// Probability mass of exactly k successes in N Bernoulli(p) trials.
/// Computed in log space so large N keeps its precision.
double binomial_pmf(std::int64_t k, std::int64_t N, double p);

/// Cumulative binomial sum for i = 0..k_max over N = n_v * tmax trials
/// with per-trial success probability d_f. With k_max = N the sum is 1
/// exactly (full binomial expansion).
double system_failure_probability(std::int64_t n_v, std::int64_t tmax,
                                  double d_f, std::int64_t k_max);

/// Nearest-rank percentile (q in [0,100]) of a sample; throws on empty.
double percentile_nearest_rank(std::vector<double> values, double q);

/// One (message, recipient) delivery attempt as the report sees it.
struct DeliveryRecord {
  std::int64_t message_id = -1;
  int recipient_id = -1;
  double created_at = 0.0;
  double delivered_at = -1.0;  // < 0: never delivered
};

struct ReceptionCounts {
  std::int64_t delivered = 0;
  std::int64_t collided = 0;
  std::int64_t out_of_range = 0;

  std::int64_t total() const { return delivered + collided + out_of_range; }
};

/// Raw material a run leaves behind for reporting.
struct RunLog {
  EventLog events;
  std::vector<DeliveryRecord> deliveries;
  ReceptionCounts receptions;
  std::vector<double> capacity_samples;  // f_c at each orchestration check
  double mean_fog_member_count = 0.0;    // time-averaged; 0 when no fog ever
};

struct RunReport {
  Protocol protocol = Protocol::dfcv;
  Scenario scenario = Scenario::urban;
  int vehicle_count = 0;
  std::uint64_t seed = 0;

  // Over delivered (message, recipient) pairs; valid iff has_delay_stats.
  double mean_delay_s = 0.0;
  double median_delay_s = 0.0;
  double p95_delay_s = 0.0;
  bool has_delay_stats = false;

  // delivered / attempted pairs; undefined when nothing was attempted.
  double delivery_probability = 0.0;
  bool has_delivery_probability = false;

  // collided / all receptions; undefined when there were no receptions.
  double collision_ratio = 0.0;
  bool has_collision_ratio = false;

  std::int64_t split_count = 0;
  std::int64_t merge_count = 0;
  std::int64_t destroy_count = 0;

  // (k_max, cumulative probability) over the full k_max range.
  std::vector<std::pair<std::int64_t, double>> failure_probability_curve;
};

/// Distills a run log into the metric suite. Pure and deterministic:
/// recomputing from the same log yields the same report.
RunReport compute_report(const RunLog& log, const SimConfig& config);

}  // namespace dfcv
