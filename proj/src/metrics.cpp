#include "dfcv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dfcv {

double binomial_pmf(std::int64_t k, std::int64_t N, double p) {
  if (N < 0 || k < 0 || k > N) {
    std::ostringstream msg;
    msg << "binomial pmf needs 0 <= k <= N, got k=" << k << " N=" << N;
    throw std::invalid_argument(msg.str());
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binomial pmf needs p in [0,1]");
  }
  if (p == 0.0) return k == 0 ? 1.0 : 0.0;
  if (p == 1.0) return k == N ? 1.0 : 0.0;
  const long double n = static_cast<long double>(N);
  const long double kk = static_cast<long double>(k);
  const long double lp = std::lgamma(n + 1.0L) - std::lgamma(kk + 1.0L) -
                         std::lgamma(n - kk + 1.0L) +
                         kk * std::log(static_cast<long double>(p)) +
                         (n - kk) * std::log1p(-static_cast<long double>(p));
  return static_cast<double>(std::exp(lp));
}

double system_failure_probability(std::int64_t n_v, std::int64_t tmax,
                                  double d_f, std::int64_t k_max) {
  if (n_v < 0 || tmax < 0) {
    throw std::invalid_argument("trial counts must be non-negative");
  }
  const std::int64_t N = n_v * tmax;
  if (k_max < 0 || k_max > N) {
    std::ostringstream msg;
    msg << "k_max=" << k_max << " outside [0, " << N << "]";
    throw std::invalid_argument(msg.str());
  }
  if (!(d_f >= 0.0 && d_f <= 1.0)) {
    throw std::invalid_argument("d_f must lie in [0,1]");
  }
  long double sum = 0.0L;
  for (std::int64_t i = 0; i <= k_max; ++i) {
    sum += static_cast<long double>(binomial_pmf(i, N, d_f));
  }
  return static_cast<double>(std::min(sum, 1.0L));
}

double percentile_nearest_rank(std::vector<double> values, double q) {
  if (values.empty()) {
    throw std::invalid_argument("percentile of an empty sample");
  }
  if (!(q >= 0.0 && q <= 100.0)) {
    throw std::invalid_argument("percentile rank must lie in [0,100]");
  }
  std::sort(values.begin(), values.end());
  const double exact = q / 100.0 * static_cast<double>(values.size());
  std::size_t rank = static_cast<std::size_t>(std::ceil(exact - 1e-12));
  if (rank < 1) rank = 1;
  if (rank > values.size()) rank = values.size();
  return values[rank - 1];
}

RunReport compute_report(const RunLog& log, const SimConfig& config) {
  RunReport report;
  report.protocol = config.protocol;
  report.scenario = config.scenario;
  report.vehicle_count = config.vehicle_count;
  report.seed = config.seed;

  std::vector<double> delays;
  std::int64_t delivered = 0;
  for (const DeliveryRecord& rec : log.deliveries) {
    if (rec.delivered_at >= 0.0) {
      ++delivered;
      delays.push_back(rec.delivered_at - rec.created_at);
    }
  }
  if (!delays.empty()) {
    report.has_delay_stats = true;
    report.mean_delay_s =
        std::accumulate(delays.begin(), delays.end(), 0.0) /
        static_cast<double>(delays.size());
    report.median_delay_s = percentile_nearest_rank(delays, 50.0);
    report.p95_delay_s = percentile_nearest_rank(delays, 95.0);
  }
  if (!log.deliveries.empty()) {
    report.has_delivery_probability = true;
    report.delivery_probability =
        static_cast<double>(delivered) /
        static_cast<double>(log.deliveries.size());
  }
  if (log.receptions.total() > 0) {
    report.has_collision_ratio = true;
    report.collision_ratio = static_cast<double>(log.receptions.collided) /
                             static_cast<double>(log.receptions.total());
  }
  for (const Event& event : log.events) {
    switch (event.kind) {
      case EventKind::split:
        ++report.split_count;
        break;
      case EventKind::merge:
        ++report.merge_count;
        break;
      case EventKind::destroy:
        ++report.destroy_count;
        break;
      case EventKind::warn:
        break;
    }
  }

  // Failure curve over every cutoff: the per-fog trial count comes from
  // the observed mean fog size (all vehicles when no fog ever existed),
  // the horizon from the message TTL, and the per-trial probability from
  // the measured delivery probability.
  if (report.has_delivery_probability) {
    std::int64_t n_v = log.mean_fog_member_count > 0.0
                           ? std::llround(log.mean_fog_member_count)
                           : config.vehicle_count;
    if (n_v < 1) n_v = 1;
    const std::int64_t tmax = static_cast<std::int64_t>(
        std::ceil(config.message_ttl_s - 1e-12));
    const std::int64_t N = n_v * std::max<std::int64_t>(tmax, 1);
    const double d_f = report.delivery_probability;
    long double running = 0.0L;
    report.failure_probability_curve.reserve(static_cast<std::size_t>(N) + 1);
    for (std::int64_t k = 0; k <= N; ++k) {
      running += static_cast<long double>(binomial_pmf(k, N, d_f));
      report.failure_probability_curve.emplace_back(
          k, static_cast<double>(std::min(running, 1.0L)));
    }
  }
  return report;
}

}  // namespace dfcv
