#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pubbench::stack {

/// Layer boundaries a message crosses, in path order. The publisher side
/// mirrors application -> client library -> middleware adapter -> transport;
/// the subscriber side walks back up.
enum class Stage : std::uint8_t {
  kAppPublish,
  kClientPublish,
  kAdapterPublish,
  kSerializeBegin,
  kSerializeEnd,
  kWireSend,
  kWireRecvComplete,
  kAdapterDeliver,
  kClientDeliver,
  kCallbackBegin,
  kCallbackEnd,
};

inline constexpr std::size_t kStageCount = 11;
inline constexpr std::size_t kPublisherStageCount = 6;

inline constexpr std::array<Stage, kStageCount> kAllStages = {
    Stage::kAppPublish,       Stage::kClientPublish,  Stage::kAdapterPublish, Stage::kSerializeBegin,
    Stage::kSerializeEnd,     Stage::kWireSend,       Stage::kWireRecvComplete, Stage::kAdapterDeliver,
    Stage::kClientDeliver,    Stage::kCallbackBegin,  Stage::kCallbackEnd,
};

std::string_view to_string(Stage stage);
std::optional<Stage> parse_stage(std::string_view text);
constexpr bool is_publisher_stage(Stage s) { return static_cast<std::size_t>(s) < kPublisherStageCount; }

struct MessageHeader {
  std::uint32_t seq = 0;
  std::uint64_t publish_ts_ns = 0;

  bool operator==(const MessageHeader&) const = default;
};

struct TraceEvent {
  std::string run_id;
  std::uint16_t node_id = 0;
  std::uint16_t topic_id = 0;
  std::uint32_t seq = 0;
  Stage stage = Stage::kAppPublish;
  std::int64_t ts_ns = 0;

  bool operator==(const TraceEvent&) const = default;
};

enum class SampleStatus : std::uint8_t { kInTime, kLate, kLost };
enum class SendStatus : std::uint8_t { kSentInTime, kSentLate, kUnsent };

std::string_view to_string(SampleStatus status);
std::string_view to_string(SendStatus status);
std::optional<SampleStatus> parse_sample_status(std::string_view text);
std::optional<SendStatus> parse_send_status(std::string_view text);

/// One (message, subscriber) outcome.
struct SampleRecord {
  std::string run_id;
  std::uint16_t topic_id = 0;
  std::uint16_t publisher_node = 0;
  std::uint16_t subscriber_node = 0;
  std::uint32_t seq = 0;
  std::int64_t publish_ts_ns = 0;
  std::optional<std::int64_t> receive_ts_ns;
  std::optional<std::int64_t> latency_ns;
  SampleStatus status = SampleStatus::kLost;

  bool operator==(const SampleRecord&) const = default;
};

/// One scheduled publish slot.
struct PublisherRecord {
  std::string run_id;
  std::uint16_t topic_id = 0;
  std::uint16_t publisher_node = 0;
  std::uint32_t seq = 0;
  std::int64_t scheduled_ns = 0;
  std::optional<std::int64_t> publish_ts_ns;
  SendStatus send_status = SendStatus::kUnsent;

  bool operator==(const PublisherRecord&) const = default;
};

/// In time iff latency <= period.
SampleStatus classify_latency(std::int64_t latency_ns, std::int64_t period_ns);

/// Late iff the publish happened more than one period after its deadline.
SendStatus classify_send(std::int64_t publish_ts_ns, std::int64_t scheduled_ns, std::int64_t period_ns);

// Canonical record orders used for persistence and merging.
bool sample_order(const SampleRecord& a, const SampleRecord& b);
bool publisher_order(const PublisherRecord& a, const PublisherRecord& b);
bool trace_order(const TraceEvent& a, const TraceEvent& b);

}  // namespace pubbench::stack
