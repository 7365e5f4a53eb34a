#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pubbench/analysis/stats.hpp"
#include "pubbench/model/config.hpp"
#include "pubbench/stack/records.hpp"

namespace pubbench::analysis {

using stack::PublisherRecord;
using stack::SampleRecord;
using stack::Stage;
using stack::TraceEvent;

struct CategoryCounts {
  std::uint64_t in_time = 0;
  std::uint64_t late = 0;
  std::uint64_t lost = 0;
  std::uint64_t sent_in_time = 0;
  std::uint64_t sent_late = 0;
  std::uint64_t unsent = 0;

  std::uint64_t sent() const { return sent_in_time + sent_late; }
  std::uint64_t scheduled() const { return sent() + unsent; }
  bool operator==(const CategoryCounts&) const = default;
};

/// Tallies both sides of one run. Every status must agree with `period_ns`
/// (a delivered sample with latency <= period is IN_TIME, a publish more
/// than one period past its deadline is SENT_LATE); a disagreement means
/// the records were produced with a different period and is an error.
CategoryCounts categorize(std::span<const SampleRecord> samples, std::span<const PublisherRecord> publishers,
                          std::int64_t period_ns);

/// Conservation violations, one line each; empty when the records balance.
/// Checks that every publisher has exactly `expected_per_publisher` slots
/// and that each (publisher, subscriber) pair accounts for every sent message.
std::vector<std::string> check_conservation(std::span<const SampleRecord> samples,
                                            std::span<const PublisherRecord> publishers,
                                            std::uint64_t expected_per_publisher);

/// 100 * lost / sent. Throws AnalysisError when nothing was sent.
double loss_percent(std::uint64_t lost, std::uint64_t sent);

struct PairLoss {
  std::uint16_t topic_id = 0;
  std::uint16_t publisher_node = 0;
  std::uint16_t subscriber_node = 0;
  std::uint64_t sent = 0;
  std::uint64_t lost = 0;
  double percent = 0.0;
};

struct LossReport {
  std::vector<PairLoss> pairs;
  std::uint64_t sent = 0;  // summed over pairs
  std::uint64_t lost = 0;
  double percent = 0.0;
};

/// Per (publisher, subscriber) and aggregated loss. Pairs with nothing sent
/// are omitted; the aggregate is 0 % for a run that sent nothing.
LossReport loss_rate(std::span<const SampleRecord> samples);

struct StagePair {
  Stage from = Stage::kAppPublish;
  Stage to = Stage::kClientPublish;
  std::int64_t mean_ns = 0;
  std::int64_t median_ns = 0;
  double share = 0.0;  // of the span on the same side
};

struct SpanSummary {
  std::uint64_t count = 0;
  std::int64_t mean_ns = 0;
  std::int64_t median_ns = 0;
};

/// Per-hop attribution. Publisher hops are measured per message on the
/// publishing node (APP_PUBLISH..WIRE_SEND); subscriber hops per delivery
/// (WIRE_RECV_COMPLETE..CALLBACK_END); the wire span joins the two. Shares
/// are mean hop / mean span over the same messages, so they sum to one.
struct LayerBreakdown {
  std::vector<StagePair> publisher_pairs;
  std::vector<StagePair> subscriber_pairs;
  SpanSummary publisher_span;
  SpanSummary wire_span;
  SpanSummary subscriber_span;
  std::uint64_t excluded_publishes = 0;
  std::uint64_t excluded_deliveries = 0;
};

LayerBreakdown layer_breakdown(std::span<const TraceEvent> traces);

struct SubscriberLatency {
  std::uint16_t subscriber_node = 0;
  LatencyStats stats;
};

struct FairnessReport {
  std::uint16_t topic_id = 0;
  std::vector<SubscriberLatency> subscribers;  // by subscriber node id
  std::int64_t spread_ns = 0;                  // max - min of the per-subscriber means
  bool staircase = false;                      // means strictly increase with node id (>= 3 subscribers)
};

/// Delivered samples of one topic. Throws AnalysisError with fewer than two
/// subscribers that received something.
FairnessReport fairness(std::span<const SampleRecord> samples);

struct TimelineBin {
  std::uint64_t index = 0;
  std::int64_t start_ns = 0;  // relative to t0
  std::uint64_t count = 0;
  std::int64_t mean_ns = 0;
};

/// Mean latency per publish-time bin, bins counted from t0_ns. Lost samples
/// carry no latency and are skipped; bins without samples are not emitted.
std::vector<TimelineBin> timeline(std::span<const SampleRecord> samples, std::int64_t bin_ns, std::int64_t t0_ns);

struct AnalysisOptions {
  bool in_time_only = false;
  std::int64_t timeline_bin_ns = 1'000'000'000;
};

struct PairStats {
  std::uint16_t topic_id = 0;
  std::uint16_t subscriber_node = 0;
  LatencyStats stats;
};

struct RunReport {
  std::string run_id;
  std::uint64_t expected_per_publisher = 0;
  std::uint64_t publishers = 0;
  CategoryCounts counts;
  std::optional<LatencyStats> latency;  // absent when nothing was delivered
  std::vector<PairStats> pair_latency;
  LossReport loss;
  LayerBreakdown layers;
  std::vector<FairnessReport> fairness;  // topics with >= 2 subscribers
  std::vector<TimelineBin> timeline;
  std::vector<std::string> conservation_errors;
};

/// Full report for one run. Pure: depends only on the record contents.
RunReport analyze(const model::BenchmarkConfig& config, std::span<const SampleRecord> samples,
                  std::span<const PublisherRecord> publishers, std::span<const TraceEvent> traces,
                  const AnalysisOptions& options = {});

}  // namespace pubbench::analysis
