#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "pubbench/transport/fragment.hpp"
#include "pubbench/transport/wire.hpp"

namespace pubbench::transport {

class ReassemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MessageKey {
  std::uint16_t topic_id = 0;
  std::uint16_t publisher_id = 0;
  std::uint32_t seq = 0;

  auto operator<=>(const MessageKey&) const = default;
};

/// Receiver's request for the fragments of one message it is missing.
struct NackRecord {
  std::uint16_t topic_id = 0;
  std::uint16_t publisher_id = 0;
  std::uint32_t seq = 0;
  std::vector<bool> missing;  // one entry per fragment; true = resend

  bool operator==(const NackRecord&) const = default;
};

/// NACK packets reuse the fixed header: frag_count carries the bitmap length
/// in bits and the payload is the bitmap, LSB-first, 1 = missing.
WirePacket encode_nack(const NackRecord& nack);
NackRecord decode_nack(const PacketHeader& header, std::span<const std::uint8_t> payload);

enum class FeedStatus { kComplete, kPending, kDuplicate };

struct CompletedMessage {
  MessageKey key;
  std::uint64_t publish_ts_ns = 0;
  std::int64_t completed_ns = 0;
  FragmentedPayload payload;
};

struct FeedResult {
  FeedStatus status = FeedStatus::kPending;
  std::optional<CompletedMessage> message;
};

struct RepairPolicy {
  std::int64_t interval_ns = 5'000'000;
  std::uint32_t max_rounds = 10;
};

struct RepairOutcome {
  std::vector<NackRecord> nacks;
  std::vector<MessageKey> abandoned;
};

/// Per-receiver fragment store. A message completes exactly once; fragments
/// of completed or abandoned messages are reported as duplicates.
class ReassemblyBuffer {
 public:
  explicit ReassemblyBuffer(RepairPolicy policy = {}) : policy_(policy) {}

  FeedResult feed(const PacketHeader& header, SharedSlice payload, std::int64_t now_ns);
  FeedResult feed(const WirePacket& packet, std::int64_t now_ns);

  /// One NACK per incomplete message that has made no progress for at least
  /// one repair interval, counted from its latest new fragment or its last
  /// NACK. Messages that already used max_rounds NACKs are abandoned instead.
  RepairOutcome repair_round(std::int64_t now_ns);

  /// Drops incomplete messages whose first fragment is older than max_age_ns.
  std::vector<MessageKey> expire(std::int64_t now_ns, std::int64_t max_age_ns);

  /// Earliest time repair_round would act on some pending message.
  std::optional<std::int64_t> next_repair_ns() const;

  std::size_t pending() const { return partial_.size(); }
  bool is_complete(const MessageKey& key) const { return completed_.contains(key); }
  bool is_abandoned(const MessageKey& key) const { return abandoned_.contains(key); }
  const RepairPolicy& policy() const { return policy_; }

 private:
  struct Partial {
    std::uint16_t frag_count = 0;
    std::uint16_t received = 0;
    std::vector<SharedSlice> fragments;
    std::vector<bool> have;
    std::uint64_t publish_ts_ns = 0;
    std::int64_t first_arrival_ns = 0;
    std::int64_t last_arrival_ns = 0;
    std::int64_t last_nack_ns = 0;
    std::uint32_t rounds = 0;

    std::int64_t repair_base() const { return std::max(last_arrival_ns, last_nack_ns); }
  };

  RepairPolicy policy_;
  std::map<MessageKey, Partial> partial_;
  std::set<MessageKey> completed_;
  std::set<MessageKey> abandoned_;
};

}  // namespace pubbench::transport
