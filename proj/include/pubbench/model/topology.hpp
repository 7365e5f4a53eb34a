#pragma once

#include <cstdint>
#include <vector>

#include "pubbench/model/config.hpp"

namespace pubbench::model {

using NodeId = std::uint16_t;
using TopicId = std::uint16_t;

enum class Role { kPublisher, kSubscriber };

struct NodeSpec {
  NodeId node_id = 0;
  Role role = Role::kPublisher;
  std::vector<TopicId> topic_ids;

  bool operator==(const NodeSpec&) const = default;
};

struct TopicSpec {
  TopicId topic_id = 0;
  NodeId publisher_node = 0;
  std::vector<NodeId> subscriber_nodes;

  bool operator==(const TopicSpec&) const = default;
};

/// Node ids are dense in [0, node_count); topic ids are dense in
/// [0, topic_count). Both are assigned deterministically from the kind:
///   PAIRED       node 2i publishes topic i, node 2i+1 subscribes to it.
///   ONE_TO_MANY  node 0 publishes topic 0, nodes 1..n-1 subscribe.
///   MANY_TO_ONE  node i < n-1 publishes topic i, node n-1 subscribes to all.
struct TopologySpec {
  std::vector<NodeSpec> nodes;
  std::vector<TopicSpec> topics;

  std::size_t publisher_count() const;
  std::size_t subscriber_count() const;
  std::size_t subscription_count() const;
  const TopicSpec& topic(TopicId id) const { return topics.at(id); }
  const NodeSpec& node(NodeId id) const { return nodes.at(id); }

  bool operator==(const TopologySpec&) const = default;
};

TopologySpec build_topology(std::uint32_t node_count, TopologyKind kind);

}  // namespace pubbench::model
