#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pubbench/stack/records.hpp"

namespace pubbench::stack {

// seq (u32 LE) followed by publish_ts_ns (u64 LE).
inline constexpr std::size_t kMessageHeaderSize = 12;

/// Copies header and payload into a fresh wire buffer of exactly
/// kMessageHeaderSize + payload.size() bytes.
std::vector<std::uint8_t> serialize(const MessageHeader& header, std::span<const std::uint8_t> payload);

MessageHeader deserialize_header(std::span<const std::uint8_t> wire);

inline std::span<const std::uint8_t> serialized_body(std::span<const std::uint8_t> wire) {
  return wire.subspan(kMessageHeaderSize);
}

}  // namespace pubbench::stack
