#include <gtest/gtest.h>

#include "pubbench/stack/records.hpp"
#include "pubbench/stack/serialize.hpp"

namespace pubbench::stack {
namespace {

TEST(Records, LatencyClassification) {
  const std::int64_t period = 100'000'000;
  EXPECT_EQ(classify_latency(5'000'000, period), SampleStatus::kInTime);
  EXPECT_EQ(classify_latency(period, period), SampleStatus::kInTime);
  EXPECT_EQ(classify_latency(period + 1, period), SampleStatus::kLate);
  EXPECT_EQ(classify_latency(120'000'000, period), SampleStatus::kLate);
}

TEST(Records, SendClassification) {
  EXPECT_EQ(classify_send(100, 0, 100), SendStatus::kSentInTime);
  EXPECT_EQ(classify_send(101, 0, 100), SendStatus::kSentLate);
}

TEST(Records, NamesRoundTrip) {
  for (const auto s : kAllStages) EXPECT_EQ(parse_stage(to_string(s)), s);
  EXPECT_FALSE(parse_stage("NOPE"));
  for (const auto s : {SampleStatus::kInTime, SampleStatus::kLate, SampleStatus::kLost}) {
    EXPECT_EQ(parse_sample_status(to_string(s)), s);
  }
  for (const auto s : {SendStatus::kSentInTime, SendStatus::kSentLate, SendStatus::kUnsent}) {
    EXPECT_EQ(parse_send_status(to_string(s)), s);
  }
  EXPECT_EQ(to_string(Stage::kWireRecvComplete), "WIRE_RECV_COMPLETE");
  EXPECT_TRUE(is_publisher_stage(Stage::kWireSend));
  EXPECT_FALSE(is_publisher_stage(Stage::kWireRecvComplete));
}

TEST(Serialize, LengthIsHeaderPlusPayload) {
  for (const std::size_t n : {0UL, 1UL, 16UL, 65536UL, 1UL << 20U}) {
    const std::vector<std::uint8_t> payload(n, 0xab);
    const auto wire = serialize({7, 99}, payload);
    ASSERT_EQ(wire.size(), kMessageHeaderSize + n);
    EXPECT_EQ(deserialize_header(wire), (MessageHeader{7, 99}));
    EXPECT_TRUE(std::equal(payload.begin(), payload.end(), serialized_body(wire).begin()));
  }
  const std::uint8_t short_buf[4] = {};
  EXPECT_THROW(deserialize_header(short_buf), std::exception);
}

}  // namespace
}  // namespace pubbench::stack
