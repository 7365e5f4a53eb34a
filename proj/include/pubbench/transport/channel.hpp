#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "pubbench/model/clock.hpp"
#include "pubbench/transport/wire.hpp"

namespace pubbench::transport {

using NodeId = std::uint16_t;

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Datagram {
  NodeId source = 0;
  std::int64_t arrival_ns = 0;
  std::shared_ptr<const std::vector<std::uint8_t>> bytes;
};

struct TransportCounters {
  std::uint64_t data_sent = 0;
  std::uint64_t nack_sent = 0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t received = 0;
  std::uint64_t dropped = 0;
  std::uint64_t refused = 0;

  TransportCounters& operator+=(const TransportCounters& o);
};

/// One node's attachment to a channel. Owned by a single execution context.
class Endpoint {
 public:
  virtual ~Endpoint() = default;

  virtual NodeId node_id() const = 0;

  /// Sends header + body as one datagram to each destination, in order.
  virtual void send(std::span<const NodeId> destinations, std::span<const std::uint8_t, kHeaderSize> header,
                    std::span<const std::uint8_t> body) = 0;

  /// Next datagram that has arrived by now_ns, if any. Never blocks.
  virtual std::optional<Datagram> receive(std::int64_t now_ns) = 0;

  /// Arrival time of the next queued datagram when it is known in advance.
  virtual std::optional<std::int64_t> next_arrival_ns() const = 0;

  /// Blocks until input is readable or the deadline passes.
  virtual void wait(std::int64_t deadline_ns) = 0;

  const TransportCounters& counters() const { return counters_; }

 protected:
  void count_sent(std::span<const std::uint8_t, kHeaderSize> header, std::size_t bytes);

  TransportCounters counters_;
};

struct SimChannelConfig {
  double loss_prob = 0.0;
  std::int64_t delay_ns = 0;
  std::uint64_t seed = 1;
  std::int64_t datagram_ns = 0;
  std::uint64_t send_ps_per_byte = 0;
};

struct SimTransfer {
  bool delivered = false;
  std::int64_t arrival_ns = 0;
};

/// Deterministic in-memory channel. Every datagram consumes one draw from a
/// single seeded stream in global send order; a draw below loss_prob drops it.
class SimChannel {
 public:
  SimChannel(SimChannelConfig config, std::size_t node_count);

  SimTransfer transfer(std::int64_t sent_ns);

  /// The endpoint charges send costs to `clock`, which must outlive it.
  std::unique_ptr<Endpoint> make_endpoint(NodeId node, Clock& clock);

  std::uint64_t draws() const;
  const SimChannelConfig& config() const { return config_; }

 private:
  friend class SimEndpoint;

  struct Queued {
    Datagram datagram;
    std::uint64_t order;
  };
  struct Later {
    bool operator()(const Queued& a, const Queued& b) const {
      return a.datagram.arrival_ns != b.datagram.arrival_ns ? a.datagram.arrival_ns > b.datagram.arrival_ns
                                                            : a.order > b.order;
    }
  };
  using Inbox = std::priority_queue<Queued, std::vector<Queued>, Later>;

  void enqueue(NodeId dest, Datagram datagram);
  std::optional<Datagram> dequeue(NodeId node, std::int64_t now_ns);
  std::optional<std::int64_t> peek(NodeId node) const;

  SimChannelConfig config_;
  mutable std::mutex mu_;
  std::mt19937_64 rng_;
  std::uint64_t draws_ = 0;
  std::uint64_t order_ = 0;
  std::vector<Inbox> inboxes_;
};

/// Loopback UDP socket bound to 127.0.0.1. Peers are addressed by node id.
class UdpEndpoint final : public Endpoint {
 public:
  /// port 0 binds an ephemeral port.
  UdpEndpoint(NodeId node, std::uint16_t port, std::uint32_t socket_buffer_bytes, const Clock& clock);
  ~UdpEndpoint() override;

  UdpEndpoint(const UdpEndpoint&) = delete;
  UdpEndpoint& operator=(const UdpEndpoint&) = delete;

  std::uint16_t port() const { return port_; }
  std::uint32_t receive_buffer_bytes() const { return rcvbuf_; }

  /// Port of every node, indexed by node id.
  void set_peers(std::vector<std::uint16_t> ports);

  NodeId node_id() const override { return node_; }
  void send(std::span<const NodeId> destinations, std::span<const std::uint8_t, kHeaderSize> header,
            std::span<const std::uint8_t> body) override;
  std::optional<Datagram> receive(std::int64_t now_ns) override;
  std::optional<std::int64_t> next_arrival_ns() const override { return std::nullopt; }
  void wait(std::int64_t deadline_ns) override;

 private:
  NodeId node_;
  const Clock& clock_;
  int fd_ = -1;
  std::uint16_t port_ = 0;
  std::uint32_t rcvbuf_ = 0;
  std::vector<std::uint16_t> peer_ports_;
  std::vector<std::uint8_t> rx_;
};

}  // namespace pubbench::transport
