#include "pubbench/report/summary.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace pubbench::report {

namespace {

using analysis::LatencyStats;

std::string num(std::int64_t v) { return std::to_string(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }

std::string topic_group(std::uint16_t topic) { return "topic" + std::to_string(topic); }
std::string sub_group(std::uint16_t topic, std::uint16_t sub) {
  return topic_group(topic) + ".sub" + std::to_string(sub);
}

void add_stats(std::vector<ReportRow>& rows, const std::string& run_id, const std::string& group,
               const LatencyStats& s) {
  const auto add = [&](const char* metric, std::string value) {
    rows.push_back(ReportRow{run_id, metric, group, std::move(value)});
  };
  add("latency_count", num(s.count));
  add("latency_mean_ns", num(s.mean_ns));
  add("latency_stddev_ns", num(s.stddev_ns));
  add("latency_min_ns", num(s.min_ns));
  add("latency_whisker_low_ns", num(s.whisker_low_ns));
  add("latency_q1_ns", num(s.q1_ns));
  add("latency_median_ns", num(s.median_ns));
  add("latency_q3_ns", num(s.q3_ns));
  add("latency_whisker_high_ns", num(s.whisker_high_ns));
  add("latency_max_ns", num(s.max_ns));
}

std::string hop_name(const analysis::StagePair& pair) {
  return std::string(to_string(pair.from)) + ">" + std::string(to_string(pair.to));
}

std::string ms(std::int64_t ns) {
  std::array<char, 48> buf{};
  std::snprintf(buf.data(), buf.size(), "%.3f", static_cast<double>(ns) / 1e6);
  return buf.data();
}

std::string pct(double v) {
  std::array<char, 48> buf{};
  std::snprintf(buf.data(), buf.size(), "%.2f%%", v);
  return buf.data();
}

}  // namespace

std::string format_decimal(double value) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

std::vector<ReportRow> report_rows(const analysis::RunReport& report) {
  std::vector<ReportRow> rows;
  const auto& id = report.run_id;
  const auto add = [&](std::string metric, std::string group, std::string value) {
    rows.push_back(ReportRow{id, std::move(metric), std::move(group), std::move(value)});
  };
  const auto& c = report.counts;
  add("messages_expected_per_publisher", "all", num(report.expected_per_publisher));
  add("publishers", "all", num(report.publishers));
  add("messages_scheduled", "all", num(c.scheduled()));
  add("messages_sent", "all", num(c.sent()));
  add("sent_in_time", "all", num(c.sent_in_time));
  add("sent_late", "all", num(c.sent_late));
  add("unsent", "all", num(c.unsent));
  add("in_time", "all", num(c.in_time));
  add("late", "all", num(c.late));
  add("lost", "all", num(c.lost));
  add("conservation_errors", "all", num(static_cast<std::uint64_t>(report.conservation_errors.size())));

  add("loss_pct", "all", format_decimal(report.loss.percent));
  for (const auto& p : report.loss.pairs) {
    add("loss_pct",
        topic_group(p.topic_id) + ".pub" + std::to_string(p.publisher_node) + ".sub" + std::to_string(p.subscriber_node),
        format_decimal(p.percent));
  }

  if (report.latency) add_stats(rows, id, "all", *report.latency);
  for (const auto& p : report.pair_latency) add_stats(rows, id, sub_group(p.topic_id, p.subscriber_node), p.stats);

  const auto& layers = report.layers;
  for (const auto* pairs : {&layers.publisher_pairs, &layers.subscriber_pairs}) {
    for (const auto& pair : *pairs) {
      add("layer_mean_ns", hop_name(pair), num(pair.mean_ns));
      add("layer_median_ns", hop_name(pair), num(pair.median_ns));
      add("layer_share", hop_name(pair), format_decimal(pair.share));
    }
  }
  const std::pair<const char*, const analysis::SpanSummary*> spans[] = {
      {"publisher", &layers.publisher_span}, {"wire", &layers.wire_span}, {"subscriber", &layers.subscriber_span}};
  for (const auto& [name, span] : spans) {
    add("span_count", name, num(span->count));
    add("span_mean_ns", name, num(span->mean_ns));
    add("span_median_ns", name, num(span->median_ns));
  }
  add("layer_excluded", "publisher", num(layers.excluded_publishes));
  add("layer_excluded", "subscriber", num(layers.excluded_deliveries));

  for (const auto& f : report.fairness) {
    add("fairness_spread_ns", topic_group(f.topic_id), num(f.spread_ns));
    add("fairness_staircase", topic_group(f.topic_id), f.staircase ? "1" : "0");
  }
  for (const auto& bin : report.timeline) {
    const auto group = "bin" + std::to_string(bin.index);
    add("timeline_start_ns", group, num(bin.start_ns));
    add("timeline_count", group, num(bin.count));
    add("timeline_mean_ns", group, num(bin.mean_ns));
  }
  return rows;
}

std::string report_text(const analysis::RunReport& report) {
  std::ostringstream out;
  const auto& c = report.counts;
  out << "run " << report.run_id << '\n';
  out << "publishers: " << report.publishers << ", expected per publisher: " << report.expected_per_publisher
      << '\n';
  out << "publisher side: scheduled " << c.scheduled() << ", sent in time " << c.sent_in_time << ", sent late "
      << c.sent_late << ", unsent " << c.unsent << '\n';
  out << "subscriber side: in time " << c.in_time << ", late " << c.late << ", lost " << c.lost << '\n';
  out << "loss: " << pct(report.loss.percent) << " (" << report.loss.lost << " of " << report.loss.sent << ")\n";
  if (report.latency) {
    const auto& s = *report.latency;
    out << "latency ms: mean " << ms(s.mean_ns) << ", stddev " << ms(s.stddev_ns) << ", min " << ms(s.min_ns)
        << ", q1 " << ms(s.q1_ns) << ", median " << ms(s.median_ns) << ", q3 " << ms(s.q3_ns) << ", max "
        << ms(s.max_ns) << " (whiskers " << ms(s.whisker_low_ns) << " .. " << ms(s.whisker_high_ns) << ", n "
        << s.count << ")\n";
  } else {
    out << "latency: no deliveries\n";
  }
  const auto& layers = report.layers;
  out << "publisher span ms: mean " << ms(layers.publisher_span.mean_ns) << " over " << layers.publisher_span.count
      << " messages";
  if (layers.excluded_publishes) out << " (" << layers.excluded_publishes << " incomplete)";
  out << '\n';
  for (const auto& pair : layers.publisher_pairs) {
    out << "  " << hop_name(pair) << ": mean " << ms(pair.mean_ns) << " ms, " << pct(100.0 * pair.share) << '\n';
  }
  out << "wire span ms: mean " << ms(layers.wire_span.mean_ns) << '\n';
  out << "subscriber span ms: mean " << ms(layers.subscriber_span.mean_ns) << " over "
      << layers.subscriber_span.count << " deliveries";
  if (layers.excluded_deliveries) out << " (" << layers.excluded_deliveries << " incomplete)";
  out << '\n';
  for (const auto& pair : layers.subscriber_pairs) {
    out << "  " << hop_name(pair) << ": mean " << ms(pair.mean_ns) << " ms, " << pct(100.0 * pair.share) << '\n';
  }
  for (const auto& f : report.fairness) {
    out << "fairness topic " << f.topic_id << ": " << f.subscribers.size() << " subscribers, spread "
        << ms(f.spread_ns) << " ms" << (f.staircase ? ", staircase ordering" : "") << '\n';
  }
  for (const auto& e : report.conservation_errors) out << "conservation: " << e << '\n';
  return out.str();
}

}  // namespace pubbench::report
