// Loss behaviour of the SIM channel seen through whole runs.

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "pubbench/analysis/analysis.hpp"
#include "pubbench/runner/runner.hpp"

namespace pubbench {
namespace {

model::BenchmarkConfig lossy(model::Reliability reliability, double q, std::uint64_t seed) {
  model::BenchmarkConfig c;
  c.node_count = 2;
  c.topology_kind = model::TopologyKind::kPaired;
  c.reliability = reliability;
  c.loss_prob = q;
  c.frequency_hz = 100;
  c.seed = seed;
  c.run_id = "loss";
  return c;
}

TEST(Loss, BestEffortFollowsTheFragmentLaw) {
  struct Case {
    std::uint64_t payload;
    int fragments;
    double q;
    double seconds;
  };
  // Fragment limit 65000: 4 fragments for 250000 bytes, 1 for 100.
  for (const auto& k : {Case{250'000, 4, 0.1, 30}, Case{100, 1, 0.2, 30}, Case{650'000, 10, 0.03, 30}}) {
    auto c = lossy(model::Reliability::kBestEffort, k.q, 11);
    c.payload_bytes = k.payload;
    c.duration_s = k.seconds;
    const auto a = runner::run_benchmark(c);
    const auto counts = analysis::categorize(a.samples, a.publisher_records, c.period_ns());
    ASSERT_EQ(counts.sent(), 3000U);
    const auto law = oracle::delivery_law(k.q, k.fragments, counts.sent());
    const double rate = static_cast<double>(counts.in_time + counts.late) / static_cast<double>(counts.sent());
    EXPECT_NEAR(rate, law.p, 3 * law.std_error) << "payload " << k.payload;
  }
}

TEST(Loss, ReliableWithUnboundedRepairLosesNothing) {
  for (const std::uint64_t seed : {1, 2, 3}) {
    auto c = lossy(model::Reliability::kReliable, 0.1, seed);
    c.payload_bytes = 300'000;
    c.duration_s = 5;
    c.max_repair_rounds = 1'000'000;
    const auto a = runner::run_benchmark(c);
    const auto counts = analysis::categorize(a.samples, a.publisher_records, c.period_ns());
    EXPECT_EQ(counts.lost, 0U) << "seed " << seed;
    EXPECT_EQ(counts.sent(), 500U);
    EXPECT_GT(a.resent, 0U);
    EXPECT_EQ(a.abandoned, 0U);
  }
}

TEST(Loss, BoundedRepairAbandonsUnderTotalLoss) {
  auto c = lossy(model::Reliability::kReliable, 0.0, 1);
  c.payload_bytes = 16;
  c.duration_s = 1;
  c.loss_prob = 1.0;
  const auto a = runner::run_benchmark(c);
  const auto counts = analysis::categorize(a.samples, a.publisher_records, c.period_ns());
  EXPECT_EQ(counts.lost, counts.sent());
  EXPECT_EQ(a.publisher_records.size(), 100U);
}

}  // namespace
}  // namespace pubbench
