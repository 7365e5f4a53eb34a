#include "pubbench/transport/wire.hpp"

#include <algorithm>
#include <cstring>
#include <string>

namespace pubbench::transport {

namespace {

template <typename T>
void put_le(std::uint8_t*& p, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    *p++ = static_cast<std::uint8_t>(static_cast<std::uint64_t>(value) >> (8 * i));
  }
}

template <typename T>
T get_le(const std::uint8_t*& p) {
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<std::uint64_t>(*p++) << (8 * i);
  return static_cast<T>(value);
}

}  // namespace

void encode_header(const PacketHeader& h, std::span<std::uint8_t, kHeaderSize> out) {
  if (h.frag_count == 0 || h.frag_index >= h.frag_count) {
    throw WireError("fragment index " + std::to_string(h.frag_index) + " out of range for count " +
                    std::to_string(h.frag_count));
  }
  std::uint8_t* p = out.data();
  std::memcpy(p, kMagic.data(), kMagic.size());
  p += kMagic.size();
  put_le(p, static_cast<std::uint8_t>(h.type));
  put_le(p, h.topic_id);
  put_le(p, h.publisher_id);
  put_le(p, h.seq);
  put_le(p, h.frag_index);
  put_le(p, h.frag_count);
  put_le(p, h.publish_ts_ns);
  put_le(p, h.payload_len);
}

PacketHeader decode_header(std::span<const std::uint8_t> datagram) {
  if (datagram.size() < kHeaderSize) {
    throw WireError("truncated packet: " + std::to_string(datagram.size()) + " bytes, header needs " +
                    std::to_string(kHeaderSize));
  }
  if (!std::equal(kMagic.begin(), kMagic.end(), datagram.begin())) throw WireError("bad magic");
  const std::uint8_t* p = datagram.data() + kMagic.size();
  PacketHeader h;
  const auto type = get_le<std::uint8_t>(p);
  if (type > static_cast<std::uint8_t>(PacketType::kHeartbeat)) {
    throw WireError("unknown packet type " + std::to_string(type));
  }
  h.type = static_cast<PacketType>(type);
  h.topic_id = get_le<std::uint16_t>(p);
  h.publisher_id = get_le<std::uint16_t>(p);
  h.seq = get_le<std::uint32_t>(p);
  h.frag_index = get_le<std::uint16_t>(p);
  h.frag_count = get_le<std::uint16_t>(p);
  h.publish_ts_ns = get_le<std::uint64_t>(p);
  h.payload_len = get_le<std::uint32_t>(p);
  if (h.frag_count == 0 || h.frag_index >= h.frag_count) throw WireError("fragment index out of range");
  if (datagram.size() - kHeaderSize != h.payload_len) {
    throw WireError("payload length mismatch: header says " + std::to_string(h.payload_len) + ", got " +
                    std::to_string(datagram.size() - kHeaderSize));
  }
  return h;
}

std::vector<std::uint8_t> encode_packet(const WirePacket& packet) {
  if (packet.header.payload_len != packet.payload.size()) {
    throw WireError("payload_len " + std::to_string(packet.header.payload_len) + " does not match payload size " +
                    std::to_string(packet.payload.size()));
  }
  std::vector<std::uint8_t> out(kHeaderSize + packet.payload.size());
  encode_header(packet.header, std::span<std::uint8_t, kHeaderSize>(out.data(), kHeaderSize));
  std::copy(packet.payload.begin(), packet.payload.end(), out.begin() + kHeaderSize);
  return out;
}

WirePacket decode_packet(std::span<const std::uint8_t> bytes) {
  WirePacket packet;
  packet.header = decode_header(bytes);
  packet.payload.assign(bytes.begin() + kHeaderSize, bytes.end());
  return packet;
}

}  // namespace pubbench::transport
