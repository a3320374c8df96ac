#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "dfcv/metrics.hpp"
#include "dfcv/rng.hpp"

using namespace dfcv;

namespace {

/// Exact pmf for small N built from integer Pascal coefficients; fully
/// independent of the log-gamma path under test.
double pmf_oracle(std::int64_t k, std::int64_t N, double p) {
  std::vector<double> row{1.0};
  for (std::int64_t n = 1; n <= N; ++n) {
    std::vector<double> next(static_cast<std::size_t>(n) + 1, 1.0);
    for (std::int64_t j = 1; j < n; ++j) {
      next[static_cast<std::size_t>(j)] =
          row[static_cast<std::size_t>(j - 1)] +
          row[static_cast<std::size_t>(j)];
    }
    row = std::move(next);
  }
  return row[static_cast<std::size_t>(k)] * std::pow(p, double(k)) *
         std::pow(1.0 - p, double(N - k));
}

RunLog make_log(int delivered, int undelivered, double delay_each) {
  RunLog log;
  for (int i = 0; i < delivered; ++i) {
    DeliveryRecord r;
    r.message_id = i;
    r.recipient_id = 1;
    r.created_at = 1.0;
    r.delivered_at = 1.0 + delay_each;
    log.deliveries.push_back(r);
  }
  for (int i = 0; i < undelivered; ++i) {
    DeliveryRecord r;
    r.message_id = 1000 + i;
    r.recipient_id = 1;
    r.created_at = 2.0;
    r.delivered_at = -1.0;
    log.deliveries.push_back(r);
  }
  log.receptions.delivered = delivered;
  log.receptions.collided = 0;
  log.receptions.out_of_range = undelivered;
  return log;
}

}  // namespace

TEST_CASE("binomial pmf matches hand values") {
  // 4 trials at one half: C(4,2)/16.
  CHECK(binomial_pmf(2, 4, 0.5) == doctest::Approx(0.375).epsilon(1e-13));
  CHECK(binomial_pmf(0, 3, 0.2) == doctest::Approx(0.512).epsilon(1e-13));
  CHECK(binomial_pmf(0, 0, 0.7) == 1.0);
}

TEST_CASE("binomial pmf edge probabilities are exact") {
  CHECK(binomial_pmf(0, 10, 0.0) == 1.0);
  CHECK(binomial_pmf(3, 10, 0.0) == 0.0);
  CHECK(binomial_pmf(10, 10, 1.0) == 1.0);
  CHECK(binomial_pmf(9, 10, 1.0) == 0.0);
}

TEST_CASE("binomial pmf rejects bad arguments") {
  CHECK_THROWS_AS(binomial_pmf(5, 4, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(binomial_pmf(-1, 4, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(binomial_pmf(1, -2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(binomial_pmf(1, 4, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(binomial_pmf(1, 4, -0.1), std::invalid_argument);
}

TEST_CASE("binomial pmf agrees with the Pascal oracle up to N = 12") {
  Rng rng = Rng::labeled(17, "pmf-oracle");
  for (int trial = 0; trial < 300; ++trial) {
    const std::int64_t N = static_cast<std::int64_t>(rng.uniform_int(13));
    const std::int64_t k =
        N == 0 ? 0 : static_cast<std::int64_t>(rng.uniform_int(
                         static_cast<std::uint64_t>(N) + 1));
    const double p = 0.01 + 0.98 * rng.uniform01();
    const double got = binomial_pmf(k, N, p);
    const double want = pmf_oracle(k, N, p);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("binomial pmf is symmetric at p = 1/2") {
  for (std::int64_t k = 0; k <= 20; ++k) {
    CHECK(binomial_pmf(k, 20, 0.5) ==
          doctest::Approx(binomial_pmf(20 - k, 20, 0.5)).epsilon(1e-14));
  }
}

TEST_CASE("failure probability matches the pinned cumulative value") {
  // 3 trials at 0.2, k_max 1: 0.8^3 + 3*0.2*0.8^2.
  CHECK(system_failure_probability(1, 3, 0.2, 1) ==
        doctest::Approx(0.896).epsilon(1e-12));
}

TEST_CASE("full cumulative sum is one and the curve is monotone in k_max") {
  CHECK(system_failure_probability(5, 8, 0.37, 40) ==
        doctest::Approx(1.0).epsilon(1e-12));
  double prev = -1.0;
  for (std::int64_t k = 0; k <= 20; ++k) {
    const double v = system_failure_probability(4, 5, 0.6, k);
    CHECK(v >= prev);
    CHECK(v <= 1.0 + 1e-15);
    prev = v;
  }
}

TEST_CASE("failure probability rejects bad arguments") {
  CHECK_THROWS_AS(system_failure_probability(-1, 3, 0.2, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(system_failure_probability(2, 3, 0.2, 7),
                  std::invalid_argument);  // k_max > N
  CHECK_THROWS_AS(system_failure_probability(2, 3, 1.4, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(system_failure_probability(2, 3, 0.2, -1),
                  std::invalid_argument);
}

TEST_CASE("nearest-rank percentile") {
  std::vector<double> ten;
  for (int i = 1; i <= 10; ++i) ten.push_back(i * 1.0);
  CHECK(percentile_nearest_rank(ten, 50.0) == 5.0);
  CHECK(percentile_nearest_rank(ten, 95.0) == 10.0);
  CHECK(percentile_nearest_rank(ten, 90.0) == 9.0);
  CHECK(percentile_nearest_rank(ten, 0.0) == 1.0);
  CHECK(percentile_nearest_rank(ten, 100.0) == 10.0);
  CHECK(percentile_nearest_rank({3.5}, 95.0) == 3.5);
  CHECK(percentile_nearest_rank({9.0, 1.0, 5.0}, 50.0) == 5.0);  // sorts
  CHECK_THROWS_AS(percentile_nearest_rank({}, 50.0), std::invalid_argument);
  CHECK_THROWS_AS(percentile_nearest_rank({1.0}, 101.0),
                  std::invalid_argument);
}

TEST_CASE("report distills delays, delivery, and collision ratio") {
  RunLog log = make_log(95, 5, 0.006072);
  log.receptions.collided = 40;  // retries that eventually delivered
  SimConfig config;
  const RunReport report = compute_report(log, config);
  REQUIRE(report.has_delay_stats);
  CHECK(report.mean_delay_s == doctest::Approx(0.006072));
  CHECK(report.median_delay_s == doctest::Approx(0.006072));
  CHECK(report.p95_delay_s == doctest::Approx(0.006072));
  REQUIRE(report.has_delivery_probability);
  CHECK(report.delivery_probability == doctest::Approx(0.95));
  REQUIRE(report.has_collision_ratio);
  CHECK(report.collision_ratio ==
        doctest::Approx(40.0 / (95.0 + 40.0 + 5.0)));
}

TEST_CASE("report flags undefined metrics instead of faking zeros") {
  RunLog empty;
  SimConfig config;
  const RunReport report = compute_report(empty, config);
  CHECK_FALSE(report.has_delay_stats);
  CHECK_FALSE(report.has_delivery_probability);
  CHECK_FALSE(report.has_collision_ratio);
  CHECK(report.failure_probability_curve.empty());
}

TEST_CASE("report counts orchestration events by kind") {
  RunLog log = make_log(1, 0, 0.005);
  log.events.push_back({1.0, EventKind::split, "x"});
  log.events.push_back({2.0, EventKind::split, "y"});
  log.events.push_back({3.0, EventKind::merge, "z"});
  log.events.push_back({4.0, EventKind::destroy, "w"});
  log.events.push_back({5.0, EventKind::warn, "v"});
  SimConfig config;
  const RunReport report = compute_report(log, config);
  CHECK(report.split_count == 2);
  CHECK(report.merge_count == 1);
  CHECK(report.destroy_count == 1);  // warn is not an orchestration count
}

TEST_CASE("failure curve spans the full k range and ends at one") {
  RunLog log = make_log(90, 10, 0.005);
  log.mean_fog_member_count = 6.4;  // rounds to n_v = 6
  SimConfig config;
  config.message_ttl_s = 10.0;  // tmax = 100 ticks? no: seconds -> 10
  const RunReport report = compute_report(log, config);
  REQUIRE_FALSE(report.failure_probability_curve.empty());
  // N = n_v * tmax with n_v from the mean fog size and tmax from the ttl.
  const std::int64_t N = 6 * 10;
  CHECK(report.failure_probability_curve.size() ==
        static_cast<std::size_t>(N) + 1);
  CHECK(report.failure_probability_curve.front().first == 0);
  CHECK(report.failure_probability_curve.back().first == N);
  CHECK(report.failure_probability_curve.back().second ==
        doctest::Approx(1.0).epsilon(1e-9));
  // Spot-check interior points against the cumulative definition.
  for (std::size_t i : {std::size_t{1}, std::size_t{10}, std::size_t{30}}) {
    const auto [k, prob] = report.failure_probability_curve[i];
    CHECK(prob ==
          doctest::Approx(system_failure_probability(6, 10, 0.9, k))
              .epsilon(1e-12));
  }
  double prev = 0.0;
  for (const auto& [k, prob] : report.failure_probability_curve) {
    CHECK(prob >= prev - 1e-15);
    prev = prob;
  }
}

TEST_CASE("failure curve falls back to the configured fleet size") {
  RunLog log = make_log(10, 0, 0.004);
  log.mean_fog_member_count = 0.0;  // no fog ever existed
  SimConfig config;
  config.vehicle_count = 3;
  config.message_ttl_s = 2.0;
  const RunReport report = compute_report(log, config);
  REQUIRE_FALSE(report.failure_probability_curve.empty());
  CHECK(report.failure_probability_curve.size() == 3 * 2 + 1);
}
