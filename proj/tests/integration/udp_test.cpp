// Real loopback sockets, short windows.

#include <gtest/gtest.h>

#include <map>

#include "pubbench/analysis/analysis.hpp"
#include "pubbench/runner/runner.hpp"

namespace pubbench {
namespace {

model::BenchmarkConfig udp(std::uint32_t nodes, model::TopologyKind kind, std::uint64_t payload) {
  model::BenchmarkConfig c;
  c.backend = model::Backend::kUdp;
  c.node_count = nodes;
  c.topology_kind = kind;
  c.payload_bytes = payload;
  c.frequency_hz = 10;
  c.duration_s = 1;
  c.discovery_wait_ms = 200;
  c.drain_ms = 300;
  c.run_id = "udp";
  return c;
}

TEST(Udp, FanOutDeliversEveryPayloadIntact) {
  const auto c = udp(4, model::TopologyKind::kOneToMany, 200'000);
  const auto a = runner::run_benchmark(c, {.verify_payloads = true});
  const auto counts = analysis::categorize(a.samples, a.publisher_records, c.period_ns());
  EXPECT_EQ(counts.scheduled(), 10U);
  EXPECT_EQ(counts.lost, 0U);
  EXPECT_EQ(counts.in_time + counts.late, 3 * counts.sent());
  std::map<std::pair<std::uint16_t, std::uint32_t>, std::uint64_t> published;
  for (const auto& d : a.published_digests) published[{d.topic_id, d.seq}] = d.digest;
  for (const auto& d : a.received_digests) EXPECT_EQ(published.at({d.topic_id, d.seq}), d.digest);
  EXPECT_TRUE(analysis::check_conservation(a.samples, a.publisher_records, 10).empty());
  EXPECT_GE(a.wall_end_ns - a.wall_start_ns, 1'000'000'000);
}

TEST(Udp, FanInAndPairs) {
  for (const auto kind : {model::TopologyKind::kManyToOne, model::TopologyKind::kPaired}) {
    const auto c = udp(4, kind, 16);
    const auto a = runner::run_benchmark(c);
    const auto counts = analysis::categorize(a.samples, a.publisher_records, c.period_ns());
    const std::uint64_t publishers = kind == model::TopologyKind::kPaired ? 2 : 3;
    EXPECT_EQ(counts.scheduled(), 10 * publishers);
    EXPECT_EQ(counts.lost, 0U);
    for (const auto& s : a.samples) EXPECT_GE(*s.latency_ns, 0);
  }
}

}  // namespace
}  // namespace pubbench
