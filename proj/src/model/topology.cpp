#include "pubbench/model/topology.hpp"

#include <algorithm>

namespace pubbench::model {

std::size_t TopologySpec::publisher_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const NodeSpec& n) { return n.role == Role::kPublisher; }));
}

std::size_t TopologySpec::subscriber_count() const { return nodes.size() - publisher_count(); }

std::size_t TopologySpec::subscription_count() const {
  std::size_t total = 0;
  for (const auto& t : topics) total += t.subscriber_nodes.size();
  return total;
}

TopologySpec build_topology(std::uint32_t node_count, TopologyKind kind) {
  if (node_count < 2) throw ConfigError("node_count must be at least 2");
  if (node_count > 65535) throw ConfigError("node_count must fit a 16-bit node id");
  if (kind == TopologyKind::kPaired && node_count % 2 != 0) {
    throw ConfigError("PAIRED requires even node_count");
  }

  TopologySpec topo;
  topo.nodes.resize(node_count);
  for (std::uint32_t i = 0; i < node_count; ++i) topo.nodes[i].node_id = static_cast<NodeId>(i);

  const auto add_topic = [&](NodeId publisher, std::vector<NodeId> subscribers) {
    const auto topic = static_cast<TopicId>(topo.topics.size());
    topo.nodes[publisher].role = Role::kPublisher;
    topo.nodes[publisher].topic_ids.push_back(topic);
    for (NodeId s : subscribers) {
      topo.nodes[s].role = Role::kSubscriber;
      topo.nodes[s].topic_ids.push_back(topic);
    }
    topo.topics.push_back({topic, publisher, std::move(subscribers)});
  };

  switch (kind) {
    case TopologyKind::kPaired:
      for (std::uint32_t i = 0; i < node_count; i += 2) {
        add_topic(static_cast<NodeId>(i), {static_cast<NodeId>(i + 1)});
      }
      break;
    case TopologyKind::kOneToMany: {
      std::vector<NodeId> subscribers;
      for (std::uint32_t i = 1; i < node_count; ++i) subscribers.push_back(static_cast<NodeId>(i));
      add_topic(0, std::move(subscribers));
      break;
    }
    case TopologyKind::kManyToOne: {
      const auto sink = static_cast<NodeId>(node_count - 1);
      for (std::uint32_t i = 0; i + 1 < node_count; ++i) add_topic(static_cast<NodeId>(i), {sink});
      break;
    }
  }
  return topo;
}

}  // namespace pubbench::model
