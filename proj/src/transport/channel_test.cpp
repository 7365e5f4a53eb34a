#include <gtest/gtest.h>

#include <array>
#include <thread>

#include "pubbench/transport/channel.hpp"

namespace pubbench::transport {
namespace {

std::array<std::uint8_t, kHeaderSize> header(std::uint32_t seq, PacketType type = PacketType::kData,
                                             std::uint32_t len = 0) {
  PacketHeader h;
  h.type = type;
  h.seq = seq;
  h.payload_len = len;
  std::array<std::uint8_t, kHeaderSize> out{};
  encode_header(h, out);
  return out;
}

std::size_t delivered(double loss, std::uint64_t seed, int n) {
  SimChannel ch({.loss_prob = loss, .seed = seed}, 2);
  std::size_t ok = 0;
  for (int i = 0; i < n; ++i) ok += ch.transfer(i).delivered ? 1 : 0;
  EXPECT_EQ(ch.draws(), static_cast<std::uint64_t>(n));
  return ok;
}

TEST(SimChannel, LossExtremes) {
  EXPECT_EQ(delivered(0.0, 1, 10000), 10000U);
  EXPECT_EQ(delivered(1.0, 1, 10000), 0U);
}

TEST(SimChannel, LossRateMatchesProbability) {
  const auto ok = delivered(0.1, 42, 100000);
  EXPECT_NEAR(1.0 - static_cast<double>(ok) / 100000.0, 0.1, 0.01);
}

TEST(SimChannel, SameSeedSameDrops) {
  SimChannel a({.loss_prob = 0.3, .seed = 9}, 2);
  SimChannel b({.loss_prob = 0.3, .seed = 9}, 2);
  SimChannel c({.loss_prob = 0.3, .seed = 10}, 2);
  int diff = 0;
  for (int i = 0; i < 1000; ++i) {
    const bool x = a.transfer(0).delivered;
    ASSERT_EQ(x, b.transfer(0).delivered);
    diff += x != c.transfer(0).delivered ? 1 : 0;
  }
  EXPECT_GT(diff, 0);
}

TEST(SimChannel, DelayAndOrdering) {
  SimChannel ch({.delay_ns = 100, .datagram_ns = 10}, 3);
  VirtualClock clock;
  auto sender = ch.make_endpoint(0, clock);
  VirtualClock rclock;
  auto receiver = ch.make_endpoint(1, rclock);
  const std::array<NodeId, 2> dests = {1, 1};
  const std::uint8_t body[] = {1, 2};
  sender->send(dests, header(5, PacketType::kData, 2), body);
  EXPECT_EQ(clock.now_ns(), 20);
  EXPECT_EQ(receiver->next_arrival_ns(), 110);
  EXPECT_FALSE(receiver->receive(109));
  const auto first = receiver->receive(500);
  ASSERT_TRUE(first);
  EXPECT_EQ(first->arrival_ns, 110);
  EXPECT_EQ(first->source, 0);
  EXPECT_EQ(first->bytes->size(), kHeaderSize + 2);
  EXPECT_EQ(receiver->receive(500)->arrival_ns, 120);
  EXPECT_FALSE(receiver->receive(500));
  EXPECT_EQ(sender->counters().data_sent, 2U);
  EXPECT_EQ(receiver->counters().received, 2U);
  EXPECT_THROW(ch.make_endpoint(3, clock), TransportError);
}

TEST(SimChannel, SendCostCountsBytes) {
  SimChannel ch({.datagram_ns = 2000, .send_ps_per_byte = 100}, 2);
  VirtualClock clock;
  auto ep = ch.make_endpoint(0, clock);
  std::vector<std::uint8_t> body(65000 - kHeaderSize + 29, 0);
  const std::array<NodeId, 1> dest = {1};
  ep->send(dest, header(0, PacketType::kData, static_cast<std::uint32_t>(body.size())), body);
  EXPECT_EQ(clock.now_ns(), 2000 + (65000 + 29) * 100 / 1000);
}

TEST(UdpEndpoint, LoopbackDelivery) {
  MonotonicClock clock;
  UdpEndpoint a(0, 0, 1U << 20U, clock);
  UdpEndpoint b(1, 0, 1U << 20U, clock);
  ASSERT_NE(a.port(), 0);
  const std::vector<std::uint16_t> ports = {a.port(), b.port()};
  a.set_peers(ports);
  b.set_peers(ports);
  const std::array<NodeId, 1> dest = {1};
  std::vector<std::uint8_t> body(60000, 7);
  a.send(dest, header(3, PacketType::kData, 60000), body);
  std::optional<Datagram> got;
  const auto deadline = clock.now_ns() + 2'000'000'000;
  while (!got && clock.now_ns() < deadline) {
    b.wait(clock.now_ns() + 10'000'000);
    got = b.receive(clock.now_ns());
  }
  ASSERT_TRUE(got);
  EXPECT_EQ(got->source, 0);
  EXPECT_EQ(got->bytes->size(), kHeaderSize + 60000);
  EXPECT_EQ(decode_header(*got->bytes).seq, 3U);
  EXPECT_EQ(a.counters().bytes_sent, kHeaderSize + 60000);
}

TEST(UdpEndpoint, OversizeAndUnknownPeer) {
  MonotonicClock clock;
  UdpEndpoint a(0, 0, 1U << 20U, clock);
  a.set_peers({a.port()});
  std::vector<std::uint8_t> body(kMaxDatagramBytes, 0);
  const std::array<NodeId, 1> self = {0};
  EXPECT_THROW(a.send(self, header(0, PacketType::kData, static_cast<std::uint32_t>(body.size())), body),
               TransportError);
  const std::array<NodeId, 1> nobody = {4};
  EXPECT_THROW(a.send(nobody, header(0), {}), TransportError);
}

TEST(UdpEndpoint, PortInUseFails) {
  MonotonicClock clock;
  UdpEndpoint a(0, 0, 1U << 16U, clock);
  EXPECT_THROW(UdpEndpoint(1, a.port(), 1U << 16U, clock), TransportError);
}

}  // namespace
}  // namespace pubbench::transport
