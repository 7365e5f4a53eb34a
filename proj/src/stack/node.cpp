#include "pubbench/stack/node.hpp"

#include <random>

#include "pubbench/transport/fragment.hpp"

namespace pubbench::stack {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31U);
}

}  // namespace

NodeSettings NodeSettings::from(const model::BenchmarkConfig& config) {
  NodeSettings s;
  s.run_id = config.run_id;
  s.period_ns = config.period_ns();
  s.payload_bytes = config.payload_bytes;
  s.fragment_limit = config.fragment_payload_bytes;
  s.reliability = config.reliability;
  s.repair.interval_ns = static_cast<std::int64_t>(config.repair_interval_ms) * 1'000'000;
  s.repair.max_rounds = config.max_repair_rounds;
  s.costs = config.backend == model::Backend::kSim ? StageCosts::from(config.sim_cost) : StageCosts{};
  s.seed = config.seed;
  return s;
}

Node::Node(const model::NodeSpec& spec, const model::TopologySpec& topology, NodeSettings settings, Clock& clock,
           transport::Endpoint& endpoint)
    : spec_(spec),
      settings_(std::move(settings)),
      clock_(clock),
      endpoint_(endpoint),
      trace_(settings_.run_id, spec.node_id),
      executor_(clock, this),
      reassembly_(settings_.repair) {
  if (spec_.role == model::Role::kPublisher) {
    if (spec_.topic_ids.size() != 1) throw std::invalid_argument("a publisher node publishes exactly one topic");
    const auto& topic = topology.topic(spec_.topic_ids.front());
    PublisherOptions opts;
    opts.topic_id = topic.topic_id;
    opts.node_id = spec_.node_id;
    opts.destinations.assign(topic.subscriber_nodes.begin(), topic.subscriber_nodes.end());
    opts.fragment_limit = settings_.fragment_limit;
    opts.keep_history = settings_.reliability == model::Reliability::kReliable;
    opts.costs = settings_.costs;
    publisher_ = std::make_unique<Publisher>(std::move(opts), clock_, endpoint_, trace_);

    // Random content, fixed per (seed, node); each message restamps the first bytes.
    std::mt19937_64 rng(splitmix64(settings_.seed) ^ splitmix64(spec_.node_id + 1ULL));
    base_payload_.resize(settings_.payload_bytes);
    for (auto& b : base_payload_) b = static_cast<std::uint8_t>(rng());
    payload_ = base_payload_;
  } else {
    for (const auto topic_id : spec_.topic_ids) {
      const auto& topic = topology.topic(topic_id);
      SubscriptionOptions opts{settings_.run_id, topic_id, spec_.node_id, topic.publisher_node, settings_.period_ns,
                               settings_.costs};
      Subscription::UserCallback callback;
      if (settings_.verify_payloads) {
        callback = [this](const transport::CompletedMessage& msg, const SampleRecord& sample) {
          records_.received_digests.push_back(
              {sample.topic_id, sample.seq, sample.subscriber_node, msg.payload.digest()});
        };
      }
      subscriptions_.emplace(std::piecewise_construct, std::forward_as_tuple(topic_id),
                             std::forward_as_tuple(std::move(opts), clock_, trace_, std::move(callback)));
    }
  }
}

void Node::schedule_publishing(std::int64_t start_ns, std::int64_t window_ns, std::uint64_t message_count) {
  if (!publisher_) throw std::logic_error("schedule_publishing on a subscriber node");
  window_end_ns_ = start_ns + window_ns;
  const auto topic = publisher_->topic_id();
  records_.publisher_records.reserve(message_count);
  for (std::uint64_t k = 0; k < message_count; ++k) {
    records_.publisher_records.push_back(PublisherRecord{settings_.run_id, topic, spec_.node_id,
                                                         static_cast<std::uint32_t>(k),
                                                         start_ns + static_cast<std::int64_t>(k) * settings_.period_ns,
                                                         std::nullopt, SendStatus::kUnsent});
  }
  if (message_count == 0) return;
  publish_timer_ = executor_.add_timer(
      start_ns, settings_.period_ns, [this](const TimerTick& tick) { on_publish_tick(tick); }, message_count);
}

void Node::on_publish_tick(const TimerTick& tick) {
  if (clock_.now_ns() >= window_end_ns_) {
    // Window closed with a backlog; remaining slots stay UNSENT.
    executor_.cancel_timer(*publish_timer_);
    return;
  }
  const auto stamp = splitmix64(tick.index);
  for (std::size_t i = 0; i < std::min<std::size_t>(8, payload_.size()); ++i) {
    payload_[i] = static_cast<std::uint8_t>(base_payload_[i] ^ (stamp >> (8 * i)));
  }
  if (settings_.verify_payloads) {
    records_.published_digests.push_back({publisher_->topic_id(), static_cast<std::uint32_t>(tick.index),
                                          spec_.node_id, transport::digest_bytes(payload_)});
  }
  auto& record = records_.publisher_records.at(tick.index);
  try {
    const auto outcome = publisher_->publish(payload_);
    record.publish_ts_ns = outcome.publish_ts_ns;
    record.send_status = classify_send(outcome.publish_ts_ns, record.scheduled_ns, settings_.period_ns);
  } catch (const transport::TransportError& e) {
    records_.diagnostics.push_back("node " + std::to_string(spec_.node_id) + " seq " +
                                   std::to_string(tick.index) + ": " + e.what());
  }
}

void Node::poll(std::int64_t) {
  while (auto datagram = endpoint_.receive(clock_.now_ns())) handle_datagram(*datagram);
  housekeeping(clock_.now_ns());
}

void Node::handle_datagram(const transport::Datagram& datagram) {
  const auto& bytes = *datagram.bytes;
  transport::PacketHeader header;
  try {
    header = transport::decode_header(bytes);
  } catch (const transport::WireError&) {
    ++records_.malformed;
    return;
  }
  const auto body = std::span<const std::uint8_t>(bytes).subspan(transport::kHeaderSize);

  if (header.type == transport::PacketType::kNack) {
    if (!publisher_) return;
    try {
      const auto nack = transport::decode_nack(header, body);
      publisher_->handle_nack(nack, datagram.source);
    } catch (const transport::WireError&) {
      ++records_.malformed;
    } catch (const transport::TransportError& e) {
      records_.diagnostics.push_back(std::string("resend failed: ") + e.what());
    }
    return;
  }
  if (header.type != transport::PacketType::kData || !subscriptions_.contains(header.topic_id)) return;

  try {
    auto result = reassembly_.feed(header, transport::SharedSlice{datagram.bytes, transport::kHeaderSize, body.size()},
                                   datagram.arrival_ns);
    if (result.status == transport::FeedStatus::kComplete) {
      trace_.record(header.topic_id, header.seq, Stage::kWireRecvComplete, result.message->completed_ns);
      ready_.push_back(std::move(*result.message));
    }
  } catch (const transport::ReassemblyError&) {
    ++records_.malformed;
  }
}

void Node::housekeeping(std::int64_t now_ns) {
  if (subscriptions_.empty() || reassembly_.pending() == 0) return;
  if (settings_.reliability == model::Reliability::kReliable) {
    const auto due = reassembly_.next_repair_ns();
    if (!due || *due > now_ns) return;
    auto outcome = reassembly_.repair_round(now_ns);
    records_.abandoned += outcome.abandoned.size();
    for (const auto& nack : outcome.nacks) {
      const auto packet = transport::encode_nack(nack);
      std::array<std::uint8_t, transport::kHeaderSize> head{};
      transport::encode_header(packet.header, head);
      const transport::NodeId to[] = {nack.publisher_id};
      try {
        endpoint_.send(to, head, packet.payload);
      } catch (const transport::TransportError& e) {
        records_.diagnostics.push_back(std::string("NACK send failed: ") + e.what());
      }
    }
  } else {
    records_.abandoned += reassembly_.expire(now_ns, settings_.stale_after_ns).size();
  }
}

bool Node::dispatch_one() {
  if (ready_.empty()) return false;
  auto message = std::move(ready_.front());
  ready_.pop_front();
  auto& subscription = subscriptions_.at(message.key.topic_id);
  records_.samples.push_back(subscription.deliver(message));
  return true;
}

std::optional<std::int64_t> Node::next_input_ns() const {
  std::optional<std::int64_t> next = endpoint_.next_arrival_ns();
  const auto consider = [&next](std::optional<std::int64_t> t) {
    if (t && (!next || *t < *next)) next = t;
  };
  if (!ready_.empty()) consider(clock_.now_ns());
  if (reassembly_.pending() > 0) {
    if (settings_.reliability == model::Reliability::kReliable) {
      consider(reassembly_.next_repair_ns());
    }
    // Best-effort expiry is bookkeeping only and never needs a wake-up.
  }
  return next;
}

void Node::wait(std::int64_t deadline_ns) { endpoint_.wait(deadline_ns); }

NodeRecords Node::take_records() {
  records_.traces = trace_.take();
  records_.counters = endpoint_.counters();
  if (publisher_) records_.resent = publisher_->resent();
  return std::move(records_);
}

}  // namespace pubbench::stack
