#include <gtest/gtest.h>

#include <set>

#include "pubbench/model/topology.hpp"

namespace pubbench::model {
namespace {

void expect_well_formed(const TopologySpec& t, std::uint32_t n) {
  ASSERT_EQ(t.nodes.size(), n);
  for (std::uint32_t i = 0; i < n; ++i) EXPECT_EQ(t.nodes[i].node_id, i);
  for (std::size_t i = 0; i < t.topics.size(); ++i) {
    const auto& topic = t.topics[i];
    EXPECT_EQ(topic.topic_id, i);
    EXPECT_FALSE(topic.subscriber_nodes.empty());
    EXPECT_EQ(t.node(topic.publisher_node).role, Role::kPublisher);
    for (const auto s : topic.subscriber_nodes) EXPECT_EQ(t.node(s).role, Role::kSubscriber);
  }
  // Every node holds exactly one role and every topic id it names points back at it.
  for (const auto& node : t.nodes) {
    ASSERT_FALSE(node.topic_ids.empty());
    for (const auto id : node.topic_ids) {
      const auto& topic = t.topic(id);
      if (node.role == Role::kPublisher) {
        EXPECT_EQ(topic.publisher_node, node.node_id);
      } else {
        EXPECT_NE(std::find(topic.subscriber_nodes.begin(), topic.subscriber_nodes.end(), node.node_id),
                  topic.subscriber_nodes.end());
      }
    }
  }
}

TEST(Topology, OneToMany32) {
  const auto t = build_topology(32, TopologyKind::kOneToMany);
  expect_well_formed(t, 32);
  EXPECT_EQ(t.publisher_count(), 1U);
  EXPECT_EQ(t.subscriber_count(), 31U);
  EXPECT_EQ(t.topics.size(), 1U);
  EXPECT_EQ(t.topics[0].publisher_node, 0);
}

TEST(Topology, PairedTwo) {
  const auto t = build_topology(2, TopologyKind::kPaired);
  expect_well_formed(t, 2);
  EXPECT_EQ(t.publisher_count(), 1U);
  EXPECT_EQ(t.subscriber_count(), 1U);
  EXPECT_EQ(t.topics.size(), 1U);
}

TEST(Topology, ManyToOne64) {
  const auto t = build_topology(64, TopologyKind::kManyToOne);
  expect_well_formed(t, 64);
  EXPECT_EQ(t.publisher_count(), 63U);
  EXPECT_EQ(t.topics.size(), 63U);
  EXPECT_EQ(t.subscriber_count(), 1U);
  EXPECT_EQ(t.node(63).topic_ids.size(), 63U);
  EXPECT_EQ(t.subscription_count(), 63U);
}

TEST(Topology, PairedEight) {
  const auto t = build_topology(8, TopologyKind::kPaired);
  expect_well_formed(t, 8);
  ASSERT_EQ(t.topics.size(), 4U);
  for (std::uint16_t i = 0; i < 4; ++i) {
    EXPECT_EQ(t.topics[i].publisher_node, 2 * i);
    EXPECT_EQ(t.topics[i].subscriber_nodes, std::vector<NodeId>{static_cast<NodeId>(2 * i + 1)});
  }
}

TEST(Topology, Errors) {
  EXPECT_THROW(build_topology(1, TopologyKind::kOneToMany), ConfigError);
  EXPECT_THROW(build_topology(0, TopologyKind::kManyToOne), ConfigError);
  EXPECT_THROW(build_topology(5, TopologyKind::kPaired), ConfigError);
}

TEST(Topology, InvariantsForEverySize) {
  for (std::uint32_t n = 2; n <= 70; ++n) {
    for (const auto kind : {TopologyKind::kPaired, TopologyKind::kOneToMany, TopologyKind::kManyToOne}) {
      if (kind == TopologyKind::kPaired && n % 2) continue;
      SCOPED_TRACE(n);
      expect_well_formed(build_topology(n, kind), n);
    }
    const auto fan_out = build_topology(n, TopologyKind::kOneToMany);
    const auto fan_in = build_topology(n, TopologyKind::kManyToOne);
    EXPECT_EQ(fan_out.publisher_count(), fan_in.subscriber_count());
    EXPECT_EQ(fan_out.subscriber_count(), fan_in.publisher_count());
    EXPECT_EQ(fan_out.subscription_count(), fan_in.subscription_count());
  }
}

}  // namespace
}  // namespace pubbench::model
