#include <gtest/gtest.h>

#include <random>

#include "pubbench/transport/wire.hpp"

namespace pubbench::transport {
namespace {

TEST(Wire, EmptyPayloadIsHeaderOnly) {
  WirePacket p;
  p.header.topic_id = 3;
  const auto bytes = encode_packet(p);
  ASSERT_EQ(bytes.size(), kHeaderSize);
  EXPECT_EQ(bytes[0], 'P');
  EXPECT_EQ(bytes[3], '1');
  EXPECT_EQ(decode_packet(bytes), p);
}

TEST(Wire, FieldsAreLittleEndian) {
  WirePacket p;
  p.header.type = PacketType::kNack;
  p.header.topic_id = 0x0102;
  p.header.publisher_id = 0x0304;
  p.header.seq = 0x05060708;
  p.header.frag_index = 1;
  p.header.frag_count = 2;
  p.header.publish_ts_ns = 0x1122334455667788ULL;
  p.payload = {9, 8, 7};
  p.header.payload_len = 3;
  const auto b = encode_packet(p);
  const std::vector<std::uint8_t> expect = {'P', 'B', 'W', '1', 1,    0x02, 0x01, 0x04, 0x03, 0x08,
                                            0x07, 0x06, 0x05, 1, 0,  2,    0,    0x88, 0x77, 0x66,
                                            0x55, 0x44, 0x33, 0x22, 0x11, 3, 0, 0, 0, 9, 8, 7};
  EXPECT_EQ(b, expect);
}

TEST(Wire, RoundTripProperty) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    WirePacket p;
    p.header.type = static_cast<PacketType>(rng() % 3);
    p.header.topic_id = static_cast<std::uint16_t>(rng());
    p.header.publisher_id = static_cast<std::uint16_t>(rng());
    p.header.seq = static_cast<std::uint32_t>(rng());
    p.header.frag_count = static_cast<std::uint16_t>(rng() % 65535 + 1);
    p.header.frag_index = static_cast<std::uint16_t>(rng() % p.header.frag_count);
    p.header.publish_ts_ns = rng();
    p.payload.resize(rng() % 300);
    for (auto& b : p.payload) b = static_cast<std::uint8_t>(rng());
    p.header.payload_len = static_cast<std::uint32_t>(p.payload.size());
    ASSERT_EQ(decode_packet(encode_packet(p)), p);
  }
}

std::string error_of(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_packet(bytes);
  } catch (const WireError& e) {
    return e.what();
  }
  return "";
}

TEST(Wire, MalformedInputIsRejected) {
  WirePacket p;
  p.payload = {1, 2, 3, 4};
  p.header.payload_len = 4;
  const auto good = encode_packet(p);

  auto bad = good;
  bad[0] = 'X';
  EXPECT_EQ(error_of(bad), "bad magic");
  EXPECT_NE(error_of({good.begin(), good.begin() + 10}).find("truncated"), std::string::npos);
  EXPECT_NE(error_of({good.begin(), good.end() - 1}).find("length mismatch"), std::string::npos);
  bad = good;
  bad[4] = 9;
  EXPECT_NE(error_of(bad).find("unknown packet type"), std::string::npos);
  bad = good;
  bad[13] = 5;  // frag_index 5 of 1
  EXPECT_NE(error_of(bad).find("out of range"), std::string::npos);
}

TEST(Wire, EncodeChecksConsistency) {
  WirePacket p;
  p.payload = {1};
  EXPECT_THROW(encode_packet(p), WireError);
  p.header.payload_len = 1;
  p.header.frag_count = 0;
  EXPECT_THROW(encode_packet(p), WireError);
}

}  // namespace
}  // namespace pubbench::transport
