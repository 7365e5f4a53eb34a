#include "pubbench/transport/fragment.hpp"

#include <algorithm>
#include <stdexcept>

namespace pubbench::transport {

std::size_t fragment_count(std::size_t payload_bytes, std::size_t limit) {
  if (limit == 0) throw std::invalid_argument("fragment limit must be at least 1 byte");
  return payload_bytes == 0 ? 1 : (payload_bytes + limit - 1) / limit;
}

std::vector<std::span<const std::uint8_t>> fragment_payload(std::span<const std::uint8_t> payload,
                                                            std::size_t limit) {
  const auto count = fragment_count(payload.size(), limit);
  std::vector<std::span<const std::uint8_t>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto offset = i * limit;
    const auto len = std::min(limit, payload.size() - offset);
    out.push_back(payload.subspan(offset, len));
  }
  return out;
}

FragmentedPayload::FragmentedPayload(std::vector<SharedSlice> parts) : parts_(std::move(parts)) {
  for (const auto& p : parts_) size_ += p.length;
}

std::vector<std::uint8_t> FragmentedPayload::to_bytes() const {
  std::vector<std::uint8_t> out;
  out.reserve(size_);
  for (const auto& p : parts_) {
    const auto b = p.bytes();
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

std::uint64_t FragmentedPayload::digest() const {
  Fnv1a h;
  for (const auto& p : parts_) h.update(p.bytes());
  return h.value();
}

void Fnv1a::update(std::span<const std::uint8_t> bytes) {
  for (auto b : bytes) {
    state_ ^= b;
    state_ *= 0x100000001b3ULL;
  }
}

std::uint64_t digest_bytes(std::span<const std::uint8_t> bytes) {
  Fnv1a h;
  h.update(bytes);
  return h.value();
}

}  // namespace pubbench::transport
