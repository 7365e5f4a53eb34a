#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace pubbench::transport {

/// Splits `payload` into ceil(len / limit) slices, at least one. Every slice
/// but the last is exactly `limit` bytes. Slices view `payload`.
std::vector<std::span<const std::uint8_t>> fragment_payload(std::span<const std::uint8_t> payload,
                                                            std::size_t limit);

std::size_t fragment_count(std::size_t payload_bytes, std::size_t limit);

/// A byte range kept alive by a shared buffer.
struct SharedSlice {
  std::shared_ptr<const std::vector<std::uint8_t>> owner;
  std::size_t offset = 0;
  std::size_t length = 0;

  std::span<const std::uint8_t> bytes() const {
    return owner ? std::span<const std::uint8_t>(owner->data() + offset, length) : std::span<const std::uint8_t>{};
  }
};

/// A reassembled message payload held as its ordered fragments, without
/// concatenation.
class FragmentedPayload {
 public:
  FragmentedPayload() = default;
  explicit FragmentedPayload(std::vector<SharedSlice> parts);

  std::size_t size() const { return size_; }
  const std::vector<SharedSlice>& parts() const { return parts_; }
  std::vector<std::uint8_t> to_bytes() const;
  std::uint64_t digest() const;

 private:
  std::vector<SharedSlice> parts_;
  std::size_t size_ = 0;
};

/// 64-bit FNV-1a, incremental.
class Fnv1a {
 public:
  void update(std::span<const std::uint8_t> bytes);
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t digest_bytes(std::span<const std::uint8_t> bytes);

}  // namespace pubbench::transport
