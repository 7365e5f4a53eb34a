#include <algorithm>
#include <exception>
#include <set>
#include <thread>
#include <tuple>

#include "pubbench/model/topology.hpp"
#include "pubbench/runner/runner.hpp"

namespace pubbench::runner {

namespace {

using stack::Node;
using stack::NodeRecords;
using stack::NodeSettings;

struct Schedule {
  std::int64_t t0_ns = 0;
  std::int64_t end_ns = 0;  // t0 + duration + drain
  std::int64_t window_ns = 0;
  std::uint64_t count = 0;
};

Schedule make_schedule(const model::BenchmarkConfig& config, std::int64_t start_ns) {
  Schedule s;
  s.t0_ns = start_ns + static_cast<std::int64_t>(config.discovery_wait_ms) * 1'000'000;
  s.window_ns = config.duration_ns();
  s.end_ns = s.t0_ns + s.window_ns + static_cast<std::int64_t>(config.drain_ms) * 1'000'000;
  s.count = model::expected_message_count(config);
  return s;
}

void arm_publishers(std::vector<std::unique_ptr<Node>>& nodes, const model::BenchmarkConfig& config,
                    const Schedule& schedule) {
  std::int64_t offset = 0;
  for (auto& node : nodes) {
    if (node->role() != model::Role::kPublisher) continue;
    node->schedule_publishing(schedule.t0_ns + offset, schedule.window_ns, schedule.count);
    offset += static_cast<std::int64_t>(config.phase_offset_ns);
  }
}

std::vector<NodeRecords> run_sim(const model::BenchmarkConfig& config, const model::TopologySpec& topology,
                                 const NodeSettings& settings) {
  const auto n = topology.nodes.size();
  transport::SimChannel channel(
      transport::SimChannelConfig{config.loss_prob, static_cast<std::int64_t>(config.sim_delay_ns), config.seed,
                                  static_cast<std::int64_t>(config.sim_cost.datagram_ns),
                                  config.sim_cost.send_ps_per_byte},
      n);
  std::vector<std::unique_ptr<VirtualClock>> clocks;
  std::vector<std::unique_ptr<transport::Endpoint>> endpoints;
  std::vector<std::unique_ptr<Node>> nodes;
  for (const auto& spec : topology.nodes) {
    clocks.push_back(std::make_unique<VirtualClock>(0));
    endpoints.push_back(channel.make_endpoint(spec.node_id, *clocks.back()));
    nodes.push_back(std::make_unique<Node>(spec, topology, settings, *clocks.back(), *endpoints.back()));
  }
  const auto schedule = make_schedule(config, 0);
  arm_publishers(nodes, config, schedule);

  // Discrete-event loop: the node with the earliest pending action runs
  // one executor iteration at that instant. A node that is still busy
  // (its clock ran ahead while working) acts when it becomes free.
  for (;;) {
    std::size_t chosen = n;
    std::int64_t chosen_at = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto next = nodes[i]->executor().next_action_ns();
      if (!next) continue;
      const auto at = std::max(*next, clocks[i]->now_ns());
      if (chosen == n || at < chosen_at) {
        chosen = i;
        chosen_at = at;
      }
    }
    if (chosen == n || chosen_at >= schedule.end_ns) break;
    auto& clock = *clocks[chosen];
    clock.advance_to(chosen_at);
    if (!nodes[chosen]->executor().spin_once()) {
      const auto next = nodes[chosen]->executor().next_action_ns();
      if (next && *next <= clock.now_ns()) clock.advance_to(clock.now_ns() + 1);
    }
  }

  std::vector<NodeRecords> records;
  records.reserve(n);
  for (auto& node : nodes) records.push_back(node->take_records());
  return records;
}

std::vector<NodeRecords> run_udp(const model::BenchmarkConfig& config, const model::TopologySpec& topology,
                                 const NodeSettings& settings) {
  const auto n = topology.nodes.size();
  MonotonicClock clock;
  std::vector<std::unique_ptr<transport::UdpEndpoint>> endpoints;
  std::vector<std::uint16_t> ports;
  for (const auto& spec : topology.nodes) {
    std::uint16_t port = 0;
    if (config.base_port != 0) {
      const auto wanted = config.base_port + spec.node_id;
      if (wanted > 65535) throw RunError("base_port leaves no room for node " + std::to_string(spec.node_id));
      port = static_cast<std::uint16_t>(wanted);
    }
    try {
      endpoints.push_back(std::make_unique<transport::UdpEndpoint>(spec.node_id, port, config.socket_buffer_bytes, clock));
    } catch (const transport::TransportError& e) {
      throw RunError(std::string("node ") + std::to_string(spec.node_id) + " startup failed: " + e.what());
    }
    ports.push_back(endpoints.back()->port());
  }
  std::vector<std::unique_ptr<Node>> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    endpoints[i]->set_peers(ports);
    nodes.push_back(std::make_unique<Node>(topology.nodes[i], topology, settings, clock, *endpoints[i]));
  }

  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> threads;
  threads.reserve(n);
  const auto spin = [&](std::size_t i, std::int64_t end_ns) {
    try {
      nodes[i]->executor().spin(end_ns);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  // Subscribers come up first; the publishers get t0 before they start.
  const auto schedule = make_schedule(config, MonotonicClock::read());
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes[i]->role() == model::Role::kSubscriber) threads.emplace_back(spin, i, schedule.end_ns);
  }
  arm_publishers(nodes, config, schedule);
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes[i]->role() == model::Role::kPublisher) threads.emplace_back(spin, i, schedule.end_ns);
  }
  for (auto& t : threads) t.join();
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw RunError("node " + std::to_string(i) + " failed: " + e.what());
    }
  }

  std::vector<NodeRecords> records;
  records.reserve(n);
  for (auto& node : nodes) records.push_back(node->take_records());
  return records;
}

}  // namespace

void merge_records(const model::TopologySpec& topology, RunArtifacts& artifacts, std::vector<NodeRecords> records) {
  auto& out = artifacts;
  for (auto& r : records) {
    std::move(r.traces.begin(), r.traces.end(), std::back_inserter(out.traces));
    std::move(r.samples.begin(), r.samples.end(), std::back_inserter(out.samples));
    std::move(r.publisher_records.begin(), r.publisher_records.end(), std::back_inserter(out.publisher_records));
    std::move(r.published_digests.begin(), r.published_digests.end(), std::back_inserter(out.published_digests));
    std::move(r.received_digests.begin(), r.received_digests.end(), std::back_inserter(out.received_digests));
    std::move(r.diagnostics.begin(), r.diagnostics.end(), std::back_inserter(out.diagnostics));
    out.counters += r.counters;
    out.abandoned += r.abandoned;
    out.malformed += r.malformed;
    out.resent += r.resent;
  }

  using Key = std::tuple<std::uint16_t, std::uint32_t>;
  std::set<Key> unsent;
  for (const auto& p : out.publisher_records) {
    if (p.send_status == stack::SendStatus::kUnsent) unsent.emplace(p.topic_id, p.seq);
  }
  std::erase_if(out.samples, [&](const stack::SampleRecord& s) { return unsent.contains({s.topic_id, s.seq}); });

  std::set<std::tuple<std::uint16_t, std::uint32_t, std::uint16_t>> delivered;
  for (const auto& s : out.samples) delivered.emplace(s.topic_id, s.seq, s.subscriber_node);
  for (const auto& p : out.publisher_records) {
    if (p.send_status == stack::SendStatus::kUnsent) continue;
    for (const auto sub : topology.topic(p.topic_id).subscriber_nodes) {
      if (delivered.contains({p.topic_id, p.seq, sub})) continue;
      stack::SampleRecord lost;
      lost.run_id = p.run_id;
      lost.topic_id = p.topic_id;
      lost.publisher_node = p.publisher_node;
      lost.subscriber_node = sub;
      lost.seq = p.seq;
      lost.publish_ts_ns = *p.publish_ts_ns;
      lost.status = stack::SampleStatus::kLost;
      out.samples.push_back(std::move(lost));
    }
  }

  std::sort(out.samples.begin(), out.samples.end(), stack::sample_order);
  std::sort(out.publisher_records.begin(), out.publisher_records.end(), stack::publisher_order);
  std::sort(out.traces.begin(), out.traces.end(), stack::trace_order);
  const auto digest_order = [](const stack::PayloadDigest& a, const stack::PayloadDigest& b) {
    return std::tie(a.topic_id, a.seq, a.node_id) < std::tie(b.topic_id, b.seq, b.node_id);
  };
  std::sort(out.published_digests.begin(), out.published_digests.end(), digest_order);
  std::sort(out.received_digests.begin(), out.received_digests.end(), digest_order);
}

RunArtifacts run_benchmark(const model::BenchmarkConfig& config, const RunOptions& options) {
  try {
    model::check_config(config);
  } catch (const model::ConfigError& e) {
    throw RunError(std::string("invalid config: ") + e.what());
  }
  const auto topology = model::build_topology(config.node_count, config.topology_kind);
  auto settings = NodeSettings::from(config);
  settings.verify_payloads = options.verify_payloads;

  RunArtifacts artifacts;
  artifacts.config = config;
  artifacts.wall_start_ns = MonotonicClock::read();
  auto records = config.backend == model::Backend::kSim ? run_sim(config, topology, settings)
                                                         : run_udp(config, topology, settings);
  artifacts.wall_end_ns = MonotonicClock::read();
  merge_records(topology, artifacts, std::move(records));
  return artifacts;
}

}  // namespace pubbench::runner
