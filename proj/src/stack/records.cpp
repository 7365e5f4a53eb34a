#include "pubbench/stack/records.hpp"

#include <tuple>

namespace pubbench::stack {

namespace {

constexpr std::array<std::string_view, kStageCount> kStageNames = {
    "APP_PUBLISH",        "CLIENT_PUBLISH",  "ADAPTER_PUBLISH", "SERIALIZE_BEGIN",
    "SERIALIZE_END",      "WIRE_SEND",       "WIRE_RECV_COMPLETE", "ADAPTER_DELIVER",
    "CLIENT_DELIVER",     "CALLBACK_BEGIN",  "CALLBACK_END",
};

}  // namespace

std::string_view to_string(Stage stage) { return kStageNames.at(static_cast<std::size_t>(stage)); }

std::optional<Stage> parse_stage(std::string_view text) {
  for (std::size_t i = 0; i < kStageNames.size(); ++i) {
    if (kStageNames[i] == text) return static_cast<Stage>(i);
  }
  return std::nullopt;
}

std::string_view to_string(SampleStatus status) {
  switch (status) {
    case SampleStatus::kInTime: return "IN_TIME";
    case SampleStatus::kLate: return "LATE";
    case SampleStatus::kLost: return "LOST";
  }
  return "?";
}

std::string_view to_string(SendStatus status) {
  switch (status) {
    case SendStatus::kSentInTime: return "SENT_IN_TIME";
    case SendStatus::kSentLate: return "SENT_LATE";
    case SendStatus::kUnsent: return "UNSENT";
  }
  return "?";
}

std::optional<SampleStatus> parse_sample_status(std::string_view text) {
  if (text == "IN_TIME") return SampleStatus::kInTime;
  if (text == "LATE") return SampleStatus::kLate;
  if (text == "LOST") return SampleStatus::kLost;
  return std::nullopt;
}

std::optional<SendStatus> parse_send_status(std::string_view text) {
  if (text == "SENT_IN_TIME") return SendStatus::kSentInTime;
  if (text == "SENT_LATE") return SendStatus::kSentLate;
  if (text == "UNSENT") return SendStatus::kUnsent;
  return std::nullopt;
}

SampleStatus classify_latency(std::int64_t latency_ns, std::int64_t period_ns) {
  return latency_ns <= period_ns ? SampleStatus::kInTime : SampleStatus::kLate;
}

SendStatus classify_send(std::int64_t publish_ts_ns, std::int64_t scheduled_ns, std::int64_t period_ns) {
  return publish_ts_ns > scheduled_ns + period_ns ? SendStatus::kSentLate : SendStatus::kSentInTime;
}

bool sample_order(const SampleRecord& a, const SampleRecord& b) {
  return std::tie(a.topic_id, a.seq, a.subscriber_node, a.publisher_node) <
         std::tie(b.topic_id, b.seq, b.subscriber_node, b.publisher_node);
}

bool publisher_order(const PublisherRecord& a, const PublisherRecord& b) {
  return std::tie(a.topic_id, a.seq, a.publisher_node) < std::tie(b.topic_id, b.seq, b.publisher_node);
}

bool trace_order(const TraceEvent& a, const TraceEvent& b) {
  return std::tie(a.topic_id, a.seq, a.stage, a.node_id, a.ts_ns) <
         std::tie(b.topic_id, b.seq, b.stage, b.node_id, b.ts_ns);
}

}  // namespace pubbench::stack
