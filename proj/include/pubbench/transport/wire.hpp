#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace pubbench::transport {

class WireError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PacketType : std::uint8_t { kData = 0, kNack = 1, kHeartbeat = 2 };

inline constexpr std::array<std::uint8_t, 4> kMagic = {'P', 'B', 'W', '1'};

// magic(4) type(1) topic(2) publisher(2) seq(4) frag_index(2) frag_count(2)
// publish_ts_ns(8) payload_len(4), little-endian, in this order.
inline constexpr std::size_t kHeaderSize = 29;

// Largest UDP payload over IPv4.
inline constexpr std::size_t kMaxDatagramBytes = 65507;

struct PacketHeader {
  PacketType type = PacketType::kData;
  std::uint16_t topic_id = 0;
  std::uint16_t publisher_id = 0;
  std::uint32_t seq = 0;
  std::uint16_t frag_index = 0;
  std::uint16_t frag_count = 1;
  std::uint64_t publish_ts_ns = 0;
  std::uint32_t payload_len = 0;

  bool operator==(const PacketHeader&) const = default;
};

struct WirePacket {
  PacketHeader header;
  std::vector<std::uint8_t> payload;

  bool operator==(const WirePacket&) const = default;
};

void encode_header(const PacketHeader& header, std::span<std::uint8_t, kHeaderSize> out);

/// Parses and checks the fixed header. `datagram_size` is the full datagram
/// length, used to check payload_len.
PacketHeader decode_header(std::span<const std::uint8_t> datagram);

std::vector<std::uint8_t> encode_packet(const WirePacket& packet);
WirePacket decode_packet(std::span<const std::uint8_t> bytes);

}  // namespace pubbench::transport
