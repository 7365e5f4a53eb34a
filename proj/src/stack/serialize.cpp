#include "pubbench/stack/serialize.hpp"

#include <cstring>
#include <stdexcept>

namespace pubbench::stack {

std::vector<std::uint8_t> serialize(const MessageHeader& header, std::span<const std::uint8_t> payload) {
  std::vector<std::uint8_t> out(kMessageHeaderSize + payload.size());
  for (std::size_t i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(header.seq >> (8 * i));
  for (std::size_t i = 0; i < 8; ++i) out[4 + i] = static_cast<std::uint8_t>(header.publish_ts_ns >> (8 * i));
  if (!payload.empty()) std::memcpy(out.data() + kMessageHeaderSize, payload.data(), payload.size());
  return out;
}

MessageHeader deserialize_header(std::span<const std::uint8_t> wire) {
  if (wire.size() < kMessageHeaderSize) throw std::invalid_argument("serialized message shorter than its header");
  MessageHeader h;
  for (std::size_t i = 0; i < 4; ++i) h.seq |= static_cast<std::uint32_t>(wire[i]) << (8 * i);
  for (std::size_t i = 0; i < 8; ++i) h.publish_ts_ns |= static_cast<std::uint64_t>(wire[4 + i]) << (8 * i);
  return h;
}

}  // namespace pubbench::stack
