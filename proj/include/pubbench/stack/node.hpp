#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pubbench/model/config.hpp"
#include "pubbench/model/topology.hpp"
#include "pubbench/stack/executor.hpp"
#include "pubbench/stack/pubsub.hpp"
#include "pubbench/transport/reassembly.hpp"

namespace pubbench::stack {

struct NodeSettings {
  std::string run_id;
  std::int64_t period_ns = 100'000'000;
  std::uint64_t payload_bytes = 0;
  std::size_t fragment_limit = model::kDefaultFragmentPayloadBytes;
  model::Reliability reliability = model::Reliability::kReliable;
  transport::RepairPolicy repair;
  // Best effort drops incomplete messages this long after their first fragment.
  std::int64_t stale_after_ns = 1'000'000'000;
  StageCosts costs;
  std::uint64_t seed = 1;
  bool verify_payloads = false;

  static NodeSettings from(const model::BenchmarkConfig& config);
};

struct PayloadDigest {
  std::uint16_t topic_id = 0;
  std::uint32_t seq = 0;
  std::uint16_t node_id = 0;
  std::uint64_t digest = 0;
};

struct NodeRecords {
  std::vector<TraceEvent> traces;
  std::vector<SampleRecord> samples;
  std::vector<PublisherRecord> publisher_records;
  std::vector<PayloadDigest> published_digests;
  std::vector<PayloadDigest> received_digests;
  std::vector<std::string> diagnostics;
  transport::TransportCounters counters;
  std::uint64_t abandoned = 0;
  std::uint64_t malformed = 0;
  std::uint64_t resent = 0;
};

/// One benchmark participant: a publisher of one topic or a subscriber of
/// one or more topics, driven by its own single-threaded executor.
class Node final : public EventSource {
 public:
  Node(const model::NodeSpec& spec, const model::TopologySpec& topology, NodeSettings settings, Clock& clock,
       transport::Endpoint& endpoint);

  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  /// Arms the publish timer: deadline k is start_ns + k * period for
  /// k < message_count. Ticks executed at or after start_ns + window_ns do
  /// not publish; their slots stay UNSENT.
  void schedule_publishing(std::int64_t start_ns, std::int64_t window_ns, std::uint64_t message_count);

  Executor& executor() { return executor_; }
  model::NodeId id() const { return spec_.node_id; }
  model::Role role() const { return spec_.role; }

  NodeRecords take_records();

  void poll(std::int64_t now_ns) override;
  bool dispatch_one() override;
  std::optional<std::int64_t> next_input_ns() const override;
  void wait(std::int64_t deadline_ns) override;

 private:
  void handle_datagram(const transport::Datagram& datagram);
  void housekeeping(std::int64_t now_ns);
  void on_publish_tick(const TimerTick& tick);

  model::NodeSpec spec_;
  NodeSettings settings_;
  Clock& clock_;
  transport::Endpoint& endpoint_;
  TraceBuffer trace_;
  Executor executor_;
  transport::ReassemblyBuffer reassembly_;

  std::unique_ptr<Publisher> publisher_;
  std::vector<std::uint8_t> payload_;
  std::vector<std::uint8_t> base_payload_;
  std::optional<TimerId> publish_timer_;
  std::int64_t window_end_ns_ = 0;

  std::map<std::uint16_t, Subscription> subscriptions_;
  std::deque<transport::CompletedMessage> ready_;

  NodeRecords records_;
};

}  // namespace pubbench::stack
