#include <algorithm>
#include <string>

#include "pubbench/transport/channel.hpp"

namespace pubbench::transport {

TransportCounters& TransportCounters::operator+=(const TransportCounters& o) {
  data_sent += o.data_sent;
  nack_sent += o.nack_sent;
  bytes_sent += o.bytes_sent;
  received += o.received;
  dropped += o.dropped;
  refused += o.refused;
  return *this;
}

void Endpoint::count_sent(std::span<const std::uint8_t, kHeaderSize> header, std::size_t bytes) {
  if (header[4] == static_cast<std::uint8_t>(PacketType::kNack)) {
    ++counters_.nack_sent;
  } else {
    ++counters_.data_sent;
  }
  counters_.bytes_sent += bytes;
}

class SimEndpoint final : public Endpoint {
 public:
  SimEndpoint(SimChannel& channel, NodeId node, Clock& clock) : channel_(channel), node_(node), clock_(clock) {}

  NodeId node_id() const override { return node_; }

  void send(std::span<const NodeId> destinations, std::span<const std::uint8_t, kHeaderSize> header,
            std::span<const std::uint8_t> body) override {
    auto bytes = std::make_shared<std::vector<std::uint8_t>>(kHeaderSize + body.size());
    std::copy(header.begin(), header.end(), bytes->begin());
    std::copy(body.begin(), body.end(), bytes->begin() + kHeaderSize);
    std::shared_ptr<const std::vector<std::uint8_t>> shared = std::move(bytes);

    const auto& cfg = channel_.config();
    const auto cost = cfg.datagram_ns +
                      static_cast<std::int64_t>(shared->size() * cfg.send_ps_per_byte / 1000U);
    for (const NodeId dest : destinations) {
      clock_.spend(cost);
      count_sent(header, shared->size());
      const auto outcome = channel_.transfer(clock_.now_ns());
      if (!outcome.delivered) {
        ++counters_.dropped;
        continue;
      }
      channel_.enqueue(dest, Datagram{node_, outcome.arrival_ns, shared});
    }
  }

  std::optional<Datagram> receive(std::int64_t now_ns) override {
    auto d = channel_.dequeue(node_, now_ns);
    if (d) ++counters_.received;
    return d;
  }

  std::optional<std::int64_t> next_arrival_ns() const override { return channel_.peek(node_); }

  void wait(std::int64_t) override {}

 private:
  SimChannel& channel_;
  NodeId node_;
  Clock& clock_;
};

SimChannel::SimChannel(SimChannelConfig config, std::size_t node_count)
    : config_(config), rng_(config.seed), inboxes_(node_count) {}

SimTransfer SimChannel::transfer(std::int64_t sent_ns) {
  std::lock_guard lock(mu_);
  ++draws_;
  // 53 random bits mapped onto [0, 1); identical on every platform.
  const double draw = static_cast<double>(rng_() >> 11U) * 0x1.0p-53;
  if (draw < config_.loss_prob) return {false, 0};
  return {true, sent_ns + config_.delay_ns};
}

std::unique_ptr<Endpoint> SimChannel::make_endpoint(NodeId node, Clock& clock) {
  if (node >= inboxes_.size()) throw TransportError("node " + std::to_string(node) + " outside channel");
  return std::make_unique<SimEndpoint>(*this, node, clock);
}

std::uint64_t SimChannel::draws() const {
  std::lock_guard lock(mu_);
  return draws_;
}

void SimChannel::enqueue(NodeId dest, Datagram datagram) {
  std::lock_guard lock(mu_);
  if (dest >= inboxes_.size()) throw TransportError("destination " + std::to_string(dest) + " outside channel");
  inboxes_[dest].push(Queued{std::move(datagram), order_++});
}

std::optional<Datagram> SimChannel::dequeue(NodeId node, std::int64_t now_ns) {
  std::lock_guard lock(mu_);
  auto& inbox = inboxes_[node];
  if (inbox.empty() || inbox.top().datagram.arrival_ns > now_ns) return std::nullopt;
  Datagram d = inbox.top().datagram;
  inbox.pop();
  return d;
}

std::optional<std::int64_t> SimChannel::peek(NodeId node) const {
  std::lock_guard lock(mu_);
  const auto& inbox = inboxes_[node];
  if (inbox.empty()) return std::nullopt;
  return inbox.top().datagram.arrival_ns;
}

}  // namespace pubbench::transport
