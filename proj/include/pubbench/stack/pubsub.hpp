#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pubbench/model/clock.hpp"
#include "pubbench/model/config.hpp"
#include "pubbench/stack/records.hpp"
#include "pubbench/transport/channel.hpp"
#include "pubbench/transport/reassembly.hpp"

namespace pubbench::stack {

/// Virtual-time charges applied at each layer hop. All zero on the real
/// backend, where the hops take whatever time they actually take.
struct StageCosts {
  std::int64_t stage_ns = 0;
  std::uint64_t serialize_ps_per_byte = 0;
  std::int64_t callback_ns = 0;

  static StageCosts from(const model::SimCostModel& model);
  std::int64_t serialize_ns(std::size_t bytes) const {
    return static_cast<std::int64_t>(bytes * serialize_ps_per_byte / 1000U);
  }
};

/// Per-node append-only trace store; flushed after the run.
class TraceBuffer {
 public:
  TraceBuffer(std::string run_id, std::uint16_t node_id) : run_id_(std::move(run_id)), node_id_(node_id) {}

  void record(std::uint16_t topic_id, std::uint32_t seq, Stage stage, std::int64_t ts_ns) {
    events_.push_back(TraceEvent{run_id_, node_id_, topic_id, seq, stage, ts_ns});
  }
  const std::vector<TraceEvent>& events() const { return events_; }
  std::vector<TraceEvent> take() { return std::move(events_); }

 private:
  std::string run_id_;
  std::uint16_t node_id_;
  std::vector<TraceEvent> events_;
};

struct PublisherOptions {
  std::uint16_t topic_id = 0;
  std::uint16_t node_id = 0;
  std::vector<transport::NodeId> destinations;
  std::size_t fragment_limit = model::kDefaultFragmentPayloadBytes;
  bool keep_history = false;
  std::size_t history_bytes = 64U << 20U;
  StageCosts costs{};
};

struct PublishOutcome {
  std::uint32_t seq = 0;
  std::int64_t publish_ts_ns = 0;
  std::size_t trace_events = 0;
  std::size_t datagrams = 0;
};

/// Publisher-side path: application -> client -> adapter -> serialize ->
/// transport. Destinations are served fragment by fragment, starting at a
/// rotating offset so no subscriber is always first.
class Publisher {
 public:
  Publisher(PublisherOptions options, Clock& clock, transport::Endpoint& endpoint, TraceBuffer& trace);

  /// Stamps the header at APP_PUBLISH and hands every fragment to the
  /// transport. Throws transport::TransportError if a send fails; the
  /// sequence number is consumed either way.
  PublishOutcome publish(std::span<const std::uint8_t> payload);

  /// Resends the fragments listed in `nack` to `requester`. Returns the
  /// number of datagrams sent (0 if the message left the history).
  std::size_t handle_nack(const transport::NackRecord& nack, transport::NodeId requester);

  std::uint32_t next_seq() const { return next_seq_; }
  std::uint16_t topic_id() const { return options_.topic_id; }
  std::uint64_t resent() const { return resent_; }

 private:
  struct Sent {
    std::uint32_t seq;
    std::uint64_t publish_ts_ns;
    std::shared_ptr<const std::vector<std::uint8_t>> wire;
  };

  void send_fragment(const Sent& msg, std::size_t index, std::size_t count, std::span<const transport::NodeId> to);

  PublisherOptions options_;
  Clock& clock_;
  transport::Endpoint& endpoint_;
  TraceBuffer& trace_;
  std::uint32_t next_seq_ = 0;
  std::deque<Sent> history_;
  std::size_t history_size_ = 0;
  std::uint64_t resent_ = 0;
};

struct SubscriptionOptions {
  std::string run_id;
  std::uint16_t topic_id = 0;
  std::uint16_t node_id = 0;
  std::uint16_t publisher_node = 0;
  std::int64_t period_ns = 0;
  StageCosts costs{};
};

/// Subscriber-side path: adapter -> client -> user callback. The receive
/// timestamp is taken at CALLBACK_BEGIN.
class Subscription {
 public:
  using UserCallback = std::function<void(const transport::CompletedMessage&, const SampleRecord&)>;

  Subscription(SubscriptionOptions options, Clock& clock, TraceBuffer& trace, UserCallback callback = {});

  SampleRecord deliver(const transport::CompletedMessage& message);

  std::uint16_t topic_id() const { return options_.topic_id; }

 private:
  SubscriptionOptions options_;
  Clock& clock_;
  TraceBuffer& trace_;
  UserCallback callback_;
};

}  // namespace pubbench::stack
