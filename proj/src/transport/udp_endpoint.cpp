#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <string>

#include "pubbench/transport/channel.hpp"

namespace pubbench::transport {

namespace {

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

sockaddr_in loopback(std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  return addr;
}

void set_buffer(int fd, int force_opt, int opt, std::uint32_t bytes) {
  const int value = static_cast<int>(bytes);
  // The FORCE variants bypass rmem_max/wmem_max when privileged.
  if (setsockopt(fd, SOL_SOCKET, force_opt, &value, sizeof(value)) != 0) {
    setsockopt(fd, SOL_SOCKET, opt, &value, sizeof(value));
  }
}

}  // namespace

UdpEndpoint::UdpEndpoint(NodeId node, std::uint16_t port, std::uint32_t socket_buffer_bytes, const Clock& clock)
    : node_(node), clock_(clock), rx_(65536) {
  fd_ = ::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0);
  if (fd_ < 0) throw TransportError(errno_text("socket"));
  set_buffer(fd_, SO_RCVBUFFORCE, SO_RCVBUF, socket_buffer_bytes);
  set_buffer(fd_, SO_SNDBUFFORCE, SO_SNDBUF, socket_buffer_bytes);

  auto addr = loopback(port);
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    const auto msg = errno_text(("bind 127.0.0.1:" + std::to_string(port)).c_str());
    ::close(fd_);
    throw TransportError(msg);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);

  int actual = 0;
  socklen_t optlen = sizeof(actual);
  ::getsockopt(fd_, SOL_SOCKET, SO_RCVBUF, &actual, &optlen);
  rcvbuf_ = static_cast<std::uint32_t>(actual);
}

UdpEndpoint::~UdpEndpoint() {
  if (fd_ >= 0) ::close(fd_);
}

void UdpEndpoint::set_peers(std::vector<std::uint16_t> ports) { peer_ports_ = std::move(ports); }

void UdpEndpoint::send(std::span<const NodeId> destinations, std::span<const std::uint8_t, kHeaderSize> header,
                       std::span<const std::uint8_t> body) {
  const auto total = kHeaderSize + body.size();
  if (total > kMaxDatagramBytes) {
    throw TransportError("datagram of " + std::to_string(total) + " bytes exceeds the UDP limit");
  }
  iovec iov[2];
  iov[0].iov_base = const_cast<std::uint8_t*>(header.data());
  iov[0].iov_len = header.size();
  iov[1].iov_base = const_cast<std::uint8_t*>(body.data());
  iov[1].iov_len = body.size();

  for (const NodeId dest : destinations) {
    if (dest >= peer_ports_.size()) throw TransportError("no address for node " + std::to_string(dest));
    auto addr = loopback(peer_ports_[dest]);
    msghdr msg{};
    msg.msg_name = &addr;
    msg.msg_namelen = sizeof(addr);
    msg.msg_iov = iov;
    msg.msg_iovlen = body.empty() ? 1 : 2;
    while (true) {
      const auto n = ::sendmsg(fd_, &msg, 0);
      if (n >= 0) break;
      if (errno == EINTR) continue;
      if (errno == ECONNREFUSED) {
        // Stale ICMP from an earlier datagram to a closed peer.
        ++counters_.refused;
        break;
      }
      throw TransportError(errno_text("sendmsg"));
    }
    count_sent(header, total);
  }
}

std::optional<Datagram> UdpEndpoint::receive(std::int64_t) {
  sockaddr_in from{};
  socklen_t from_len = sizeof(from);
  while (true) {
    const auto n = ::recvfrom(fd_, rx_.data(), rx_.size(), MSG_DONTWAIT, reinterpret_cast<sockaddr*>(&from),
                              &from_len);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK || errno == ECONNREFUSED) return std::nullopt;
      throw TransportError(errno_text("recvfrom"));
    }
    const auto now = clock_.now_ns();
    const auto source_port = ntohs(from.sin_port);
    NodeId source = 0;
    bool known = false;
    for (std::size_t i = 0; i < peer_ports_.size(); ++i) {
      if (peer_ports_[i] == source_port) {
        source = static_cast<NodeId>(i);
        known = true;
        break;
      }
    }
    if (!known) continue;
    ++counters_.received;
    return Datagram{source, now,
                    std::make_shared<const std::vector<std::uint8_t>>(rx_.begin(), rx_.begin() + n)};
  }
}

void UdpEndpoint::wait(std::int64_t deadline_ns) {
  const auto remaining = deadline_ns - clock_.now_ns();
  if (remaining <= 0) return;
  pollfd pfd{fd_, POLLIN, 0};
  timespec ts{static_cast<time_t>(remaining / 1'000'000'000), static_cast<long>(remaining % 1'000'000'000)};
  ::ppoll(&pfd, 1, &ts, nullptr);
}

}  // namespace pubbench::transport
