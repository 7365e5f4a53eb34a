#include "pubbench/analysis/analysis.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <tuple>

namespace pubbench::analysis {

namespace {

using stack::SampleStatus;
using stack::SendStatus;

std::string describe(const SampleRecord& s) {
  return "topic " + std::to_string(s.topic_id) + " seq " + std::to_string(s.seq) + " subscriber " +
         std::to_string(s.subscriber_node);
}

bool delivered(const SampleRecord& s) { return s.status != SampleStatus::kLost && s.latency_ns.has_value(); }

// Sum of deltas over sum of spans; equals the ratio of the two means.
double share(std::span<const std::int64_t> deltas, std::span<const std::int64_t> spans) {
  long double num = 0;
  long double den = 0;
  for (const auto d : deltas) num += static_cast<long double>(d);
  for (const auto s : spans) den += static_cast<long double>(s);
  return den > 0 ? static_cast<double>(num / den) : 0.0;
}

SpanSummary summarize(std::span<const std::int64_t> values) {
  if (values.empty()) return {};
  const auto stats = latency_stats(values);
  return SpanSummary{stats.count, stats.mean_ns, stats.median_ns};
}

std::vector<StagePair> hop_pairs(std::size_t first, std::size_t last,
                                 const std::vector<std::array<std::int64_t, stack::kStageCount>>& complete) {
  std::vector<std::int64_t> spans;
  spans.reserve(complete.size());
  for (const auto& ts : complete) spans.push_back(ts[last] - ts[first]);
  std::vector<StagePair> pairs;
  for (std::size_t i = first; i < last; ++i) {
    StagePair pair;
    pair.from = stack::kAllStages[i];
    pair.to = stack::kAllStages[i + 1];
    if (!complete.empty()) {
      std::vector<std::int64_t> deltas;
      deltas.reserve(complete.size());
      for (const auto& ts : complete) deltas.push_back(ts[i + 1] - ts[i]);
      const auto stats = latency_stats(deltas);
      pair.mean_ns = stats.mean_ns;
      pair.median_ns = stats.median_ns;
      pair.share = share(deltas, spans);
    }
    pairs.push_back(pair);
  }
  return pairs;
}

}  // namespace

CategoryCounts categorize(std::span<const SampleRecord> samples, std::span<const PublisherRecord> publishers,
                          std::int64_t period_ns) {
  if (period_ns <= 0) throw AnalysisError("period must be positive");
  CategoryCounts c;
  for (const auto& s : samples) {
    if (s.status == SampleStatus::kLost) {
      ++c.lost;
      continue;
    }
    if (!s.latency_ns) throw AnalysisError("delivered sample without latency: " + describe(s));
    if (stack::classify_latency(*s.latency_ns, period_ns) != s.status) {
      throw AnalysisError("period mismatch: " + describe(s) + " is " + std::string(to_string(s.status)) +
                          " at latency " + std::to_string(*s.latency_ns) + " ns with period " +
                          std::to_string(period_ns) + " ns");
    }
    ++(s.status == SampleStatus::kInTime ? c.in_time : c.late);
  }
  for (const auto& p : publishers) {
    if (p.send_status == SendStatus::kUnsent) {
      ++c.unsent;
      continue;
    }
    if (!p.publish_ts_ns) throw AnalysisError("sent publisher record without timestamp");
    if (stack::classify_send(*p.publish_ts_ns, p.scheduled_ns, period_ns) != p.send_status) {
      throw AnalysisError("period mismatch: publish of topic " + std::to_string(p.topic_id) + " seq " +
                          std::to_string(p.seq) + " is " + std::string(to_string(p.send_status)) +
                          " with period " + std::to_string(period_ns) + " ns");
    }
    ++(p.send_status == SendStatus::kSentInTime ? c.sent_in_time : c.sent_late);
  }
  return c;
}

std::vector<std::string> check_conservation(std::span<const SampleRecord> samples,
                                            std::span<const PublisherRecord> publishers,
                                            std::uint64_t expected_per_publisher) {
  std::vector<std::string> errors;
  std::map<std::pair<std::uint16_t, std::uint16_t>, std::uint64_t> slots;
  std::map<std::uint16_t, std::set<std::uint32_t>> sent;
  for (const auto& p : publishers) {
    ++slots[{p.topic_id, p.publisher_node}];
    if (p.send_status != SendStatus::kUnsent) sent[p.topic_id].insert(p.seq);
  }
  for (const auto& [key, count] : slots) {
    if (count != expected_per_publisher) {
      errors.push_back("publisher " + std::to_string(key.second) + " on topic " + std::to_string(key.first) +
                       " has " + std::to_string(count) + " slots, expected " +
                       std::to_string(expected_per_publisher));
    }
  }
  std::map<std::pair<std::uint16_t, std::uint16_t>, std::set<std::uint32_t>> seen;
  for (const auto& s : samples) {
    if (!seen[{s.topic_id, s.subscriber_node}].insert(s.seq).second) {
      errors.push_back("duplicate sample for " + describe(s));
    }
  }
  for (const auto& [key, seqs] : seen) {
    const auto it = sent.find(key.first);
    const auto& expected = it == sent.end() ? std::set<std::uint32_t>{} : it->second;
    if (seqs != expected) {
      errors.push_back("topic " + std::to_string(key.first) + " subscriber " + std::to_string(key.second) +
                       " accounts for " + std::to_string(seqs.size()) + " messages, publisher sent " +
                       std::to_string(expected.size()));
    }
  }
  return errors;
}

double loss_percent(std::uint64_t lost, std::uint64_t sent) {
  if (sent == 0) throw AnalysisError("loss rate undefined: nothing was sent");
  return 100.0 * static_cast<double>(lost) / static_cast<double>(sent);
}

LossReport loss_rate(std::span<const SampleRecord> samples) {
  std::map<std::tuple<std::uint16_t, std::uint16_t, std::uint16_t>, PairLoss> pairs;
  for (const auto& s : samples) {
    auto& pair = pairs[{s.topic_id, s.publisher_node, s.subscriber_node}];
    pair.topic_id = s.topic_id;
    pair.publisher_node = s.publisher_node;
    pair.subscriber_node = s.subscriber_node;
    ++pair.sent;
    if (s.status == SampleStatus::kLost) ++pair.lost;
  }
  LossReport report;
  for (auto& [key, pair] : pairs) {
    pair.percent = loss_percent(pair.lost, pair.sent);
    report.sent += pair.sent;
    report.lost += pair.lost;
    report.pairs.push_back(pair);
  }
  report.percent = report.sent == 0 ? 0.0 : loss_percent(report.lost, report.sent);
  return report;
}

LayerBreakdown layer_breakdown(std::span<const TraceEvent> traces) {
  using Stamps = std::array<std::optional<std::int64_t>, stack::kStageCount>;
  std::map<std::pair<std::uint16_t, std::uint32_t>, Stamps> publishes;
  std::map<std::tuple<std::uint16_t, std::uint32_t, std::uint16_t>, Stamps> deliveries;
  for (const auto& e : traces) {
    const auto idx = static_cast<std::size_t>(e.stage);
    auto& stamps = stack::is_publisher_stage(e.stage) ? publishes[{e.topic_id, e.seq}]
                                                      : deliveries[{e.topic_id, e.seq, e.node_id}];
    if (!stamps[idx]) stamps[idx] = e.ts_ns;
  }

  constexpr auto kWireSend = static_cast<std::size_t>(Stage::kWireSend);
  constexpr auto kRecv = static_cast<std::size_t>(Stage::kWireRecvComplete);
  constexpr auto kLast = stack::kStageCount - 1;
  const auto filled = [](const Stamps& s, std::size_t first, std::size_t last) {
    return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(first), s.begin() + static_cast<std::ptrdiff_t>(last) + 1,
                       [](const auto& t) { return t.has_value(); });
  };
  const auto flatten = [](const Stamps& s) {
    std::array<std::int64_t, stack::kStageCount> out{};
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s[i].value_or(0);
    return out;
  };

  LayerBreakdown result;
  std::vector<std::array<std::int64_t, stack::kStageCount>> pub_complete;
  for (const auto& [key, stamps] : publishes) {
    if (filled(stamps, 0, kWireSend)) {
      pub_complete.push_back(flatten(stamps));
    } else {
      ++result.excluded_publishes;
    }
  }
  std::vector<std::array<std::int64_t, stack::kStageCount>> sub_complete;
  std::vector<std::int64_t> wire;
  for (const auto& [key, stamps] : deliveries) {
    if (!filled(stamps, kRecv, kLast)) {
      ++result.excluded_deliveries;
      continue;
    }
    sub_complete.push_back(flatten(stamps));
    const auto pub = publishes.find({std::get<0>(key), std::get<1>(key)});
    if (pub != publishes.end() && pub->second[kWireSend]) wire.push_back(*stamps[kRecv] - *pub->second[kWireSend]);
  }

  result.publisher_pairs = hop_pairs(0, kWireSend, pub_complete);
  result.subscriber_pairs = hop_pairs(kRecv, kLast, sub_complete);
  std::vector<std::int64_t> spans;
  for (const auto& ts : pub_complete) spans.push_back(ts[kWireSend] - ts[0]);
  result.publisher_span = summarize(spans);
  spans.clear();
  for (const auto& ts : sub_complete) spans.push_back(ts[kLast] - ts[kRecv]);
  result.subscriber_span = summarize(spans);
  result.wire_span = summarize(wire);
  return result;
}

FairnessReport fairness(std::span<const SampleRecord> samples) {
  std::map<std::uint16_t, std::vector<std::int64_t>> by_subscriber;
  FairnessReport report;
  for (const auto& s : samples) {
    if (!delivered(s)) continue;
    report.topic_id = s.topic_id;
    by_subscriber[s.subscriber_node].push_back(*s.latency_ns);
  }
  if (by_subscriber.size() < 2) throw AnalysisError("fairness needs at least two subscribers with deliveries");
  for (const auto& [node, latencies] : by_subscriber) {
    report.subscribers.push_back(SubscriberLatency{node, latency_stats(latencies)});
  }
  const auto [lo, hi] = std::minmax_element(report.subscribers.begin(), report.subscribers.end(),
                                            [](const auto& a, const auto& b) { return a.stats.mean_ns < b.stats.mean_ns; });
  report.spread_ns = hi->stats.mean_ns - lo->stats.mean_ns;
  report.staircase = report.subscribers.size() >= 3 &&
                     std::adjacent_find(report.subscribers.begin(), report.subscribers.end(), [](const auto& a, const auto& b) {
                       return a.stats.mean_ns >= b.stats.mean_ns;
                     }) == report.subscribers.end();
  return report;
}

std::vector<TimelineBin> timeline(std::span<const SampleRecord> samples, std::int64_t bin_ns, std::int64_t t0_ns) {
  if (bin_ns <= 0) throw AnalysisError("timeline bin width must be positive");
  std::map<std::int64_t, std::vector<std::int64_t>> bins;
  for (const auto& s : samples) {
    if (!delivered(s) || s.publish_ts_ns < t0_ns) continue;
    bins[(s.publish_ts_ns - t0_ns) / bin_ns].push_back(*s.latency_ns);
  }
  std::vector<TimelineBin> out;
  out.reserve(bins.size());
  for (const auto& [index, latencies] : bins) {
    out.push_back(TimelineBin{static_cast<std::uint64_t>(index), index * bin_ns, latencies.size(), rounded_mean(latencies)});
  }
  return out;
}

RunReport analyze(const model::BenchmarkConfig& config, std::span<const SampleRecord> samples,
                  std::span<const PublisherRecord> publishers, std::span<const TraceEvent> traces,
                  const AnalysisOptions& options) {
  RunReport report;
  report.run_id = config.run_id;
  report.expected_per_publisher = model::expected_message_count(config);
  report.counts = categorize(samples, publishers, config.period_ns());
  report.conservation_errors = check_conservation(samples, publishers, report.expected_per_publisher);
  std::set<std::pair<std::uint16_t, std::uint16_t>> pubs;
  for (const auto& p : publishers) pubs.emplace(p.topic_id, p.publisher_node);
  report.publishers = pubs.size();

  std::vector<SampleRecord> selected;
  for (const auto& s : samples) {
    if (!delivered(s)) continue;
    if (options.in_time_only && s.status != SampleStatus::kInTime) continue;
    selected.push_back(s);
  }

  std::vector<std::int64_t> all;
  std::map<std::pair<std::uint16_t, std::uint16_t>, std::vector<std::int64_t>> per_pair;
  std::map<std::uint16_t, std::vector<SampleRecord>> per_topic;
  for (const auto& s : selected) {
    all.push_back(*s.latency_ns);
    per_pair[{s.topic_id, s.subscriber_node}].push_back(*s.latency_ns);
    per_topic[s.topic_id].push_back(s);
  }
  if (!all.empty()) report.latency = latency_stats(all);
  for (const auto& [key, latencies] : per_pair) {
    report.pair_latency.push_back(PairStats{key.first, key.second, latency_stats(latencies)});
  }
  for (const auto& [topic, topic_samples] : per_topic) {
    std::set<std::uint16_t> subs;
    for (const auto& s : topic_samples) subs.insert(s.subscriber_node);
    if (subs.size() >= 2) report.fairness.push_back(fairness(topic_samples));
  }

  report.loss = loss_rate(samples);
  report.layers = layer_breakdown(traces);

  std::int64_t t0 = 0;
  if (!publishers.empty()) {
    t0 = std::min_element(publishers.begin(), publishers.end(), [](const auto& a, const auto& b) {
           return a.scheduled_ns < b.scheduled_ns;
         })->scheduled_ns;
  }
  report.timeline = timeline(selected, options.timeline_bin_ns, t0);
  return report;
}

}  // namespace pubbench::analysis
