#include "pubbench/stack/pubsub.hpp"

#include <algorithm>

#include "pubbench/stack/serialize.hpp"
#include "pubbench/transport/fragment.hpp"

namespace pubbench::stack {

StageCosts StageCosts::from(const model::SimCostModel& model) {
  return StageCosts{static_cast<std::int64_t>(model.stage_ns), model.serialize_ps_per_byte,
                    static_cast<std::int64_t>(model.callback_ns)};
}

Publisher::Publisher(PublisherOptions options, Clock& clock, transport::Endpoint& endpoint, TraceBuffer& trace)
    : options_(std::move(options)), clock_(clock), endpoint_(endpoint), trace_(trace) {
  if (options_.fragment_limit == 0) throw std::invalid_argument("fragment limit must be positive");
}

PublishOutcome Publisher::publish(std::span<const std::uint8_t> payload) {
  const auto topic = options_.topic_id;
  const auto seq = next_seq_++;
  const auto& costs = options_.costs;

  const auto app_ts = clock_.now_ns();
  trace_.record(topic, seq, Stage::kAppPublish, app_ts);
  clock_.spend(costs.stage_ns);
  trace_.record(topic, seq, Stage::kClientPublish, clock_.now_ns());
  clock_.spend(costs.stage_ns);
  trace_.record(topic, seq, Stage::kAdapterPublish, clock_.now_ns());
  clock_.spend(costs.stage_ns);

  trace_.record(topic, seq, Stage::kSerializeBegin, clock_.now_ns());
  const MessageHeader header{seq, static_cast<std::uint64_t>(app_ts)};
  Sent msg{seq, header.publish_ts_ns, std::make_shared<const std::vector<std::uint8_t>>(serialize(header, payload))};
  clock_.spend(costs.serialize_ns(msg.wire->size()));
  trace_.record(topic, seq, Stage::kSerializeEnd, clock_.now_ns());
  clock_.spend(costs.stage_ns);
  trace_.record(topic, seq, Stage::kWireSend, clock_.now_ns());

  const auto& dests = options_.destinations;
  std::vector<transport::NodeId> order(dests.size());
  if (!dests.empty()) {
    const auto offset = seq % dests.size();
    std::rotate_copy(dests.begin(), dests.begin() + static_cast<std::ptrdiff_t>(offset), dests.end(), order.begin());
  }

  const auto count = transport::fragment_count(payload.size(), options_.fragment_limit);
  if (options_.keep_history) {
    history_.push_back(msg);
    history_size_ += msg.wire->size();
    while (history_.size() > 1 && history_size_ > options_.history_bytes) {
      history_size_ -= history_.front().wire->size();
      history_.pop_front();
    }
  }
  for (std::size_t i = 0; i < count; ++i) send_fragment(msg, i, count, order);
  return PublishOutcome{seq, app_ts, kPublisherStageCount, count * order.size()};
}

void Publisher::send_fragment(const Sent& msg, std::size_t index, std::size_t count,
                              std::span<const transport::NodeId> to) {
  const auto body = serialized_body(*msg.wire);
  const auto offset = index * options_.fragment_limit;
  const auto len = std::min(options_.fragment_limit, body.size() - offset);
  transport::PacketHeader h;
  h.type = transport::PacketType::kData;
  h.topic_id = options_.topic_id;
  h.publisher_id = options_.node_id;
  h.seq = msg.seq;
  h.frag_index = static_cast<std::uint16_t>(index);
  h.frag_count = static_cast<std::uint16_t>(count);
  h.publish_ts_ns = msg.publish_ts_ns;
  h.payload_len = static_cast<std::uint32_t>(len);
  std::array<std::uint8_t, transport::kHeaderSize> head{};
  transport::encode_header(h, head);
  endpoint_.send(to, head, body.subspan(offset, len));
}

std::size_t Publisher::handle_nack(const transport::NackRecord& nack, transport::NodeId requester) {
  if (nack.topic_id != options_.topic_id || nack.publisher_id != options_.node_id) return 0;
  const auto it = std::find_if(history_.rbegin(), history_.rend(), [&](const Sent& s) { return s.seq == nack.seq; });
  if (it == history_.rend()) return 0;
  const auto count = transport::fragment_count(it->wire->size() - kMessageHeaderSize, options_.fragment_limit);
  if (nack.missing.size() != count) return 0;
  const transport::NodeId to[] = {requester};
  std::size_t sent = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (!nack.missing[i]) continue;
    send_fragment(*it, i, count, to);
    ++sent;
  }
  resent_ += sent;
  return sent;
}

Subscription::Subscription(SubscriptionOptions options, Clock& clock, TraceBuffer& trace, UserCallback callback)
    : options_(std::move(options)), clock_(clock), trace_(trace), callback_(std::move(callback)) {}

SampleRecord Subscription::deliver(const transport::CompletedMessage& message) {
  const auto topic = options_.topic_id;
  const auto seq = message.key.seq;
  const auto& costs = options_.costs;

  trace_.record(topic, seq, Stage::kAdapterDeliver, clock_.now_ns());
  clock_.spend(costs.stage_ns);
  trace_.record(topic, seq, Stage::kClientDeliver, clock_.now_ns());
  clock_.spend(costs.stage_ns);

  const auto receive_ts = clock_.now_ns();
  trace_.record(topic, seq, Stage::kCallbackBegin, receive_ts);
  SampleRecord sample;
  sample.run_id = options_.run_id;
  sample.topic_id = topic;
  sample.publisher_node = options_.publisher_node;
  sample.subscriber_node = options_.node_id;
  sample.seq = seq;
  sample.publish_ts_ns = static_cast<std::int64_t>(message.publish_ts_ns);
  sample.receive_ts_ns = receive_ts;
  sample.latency_ns = receive_ts - sample.publish_ts_ns;
  sample.status = classify_latency(*sample.latency_ns, options_.period_ns);
  if (callback_) callback_(message, sample);
  clock_.spend(costs.callback_ns);
  trace_.record(topic, seq, Stage::kCallbackEnd, clock_.now_ns());
  return sample;
}

}  // namespace pubbench::stack
