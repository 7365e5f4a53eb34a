#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "pubbench/report/csv.hpp"
#include "pubbench/report/summary.hpp"

namespace pubbench::report {
namespace {

using stack::PublisherRecord;
using stack::SampleRecord;
using stack::SampleStatus;
using stack::SendStatus;
using stack::TraceEvent;

std::vector<SampleRecord> three_samples() {
  return {
      {"run-a", 0, 0, 1, 0, 1'000'000'000, 1'000'014'032, 14'032, SampleStatus::kInTime},
      {"run-a", 0, 0, 1, 1, 1'100'000'000, 1'220'000'000, 120'000'000, SampleStatus::kLate},
      {"run-a", 0, 0, 1, 2, 1'200'000'000, std::nullopt, std::nullopt, SampleStatus::kLost},
  };
}

template <typename T, typename W, typename R>
std::vector<T> roundtrip(const std::vector<T>& in, W write, R read) {
  std::stringstream ss;
  write(ss, in);
  return read(ss);
}

TEST(Csv, SamplesRoundTrip) {
  const auto s = three_samples();
  EXPECT_EQ(roundtrip(s, write_samples, read_samples), s);
}

TEST(Csv, SamplesFileLayout) {
  std::stringstream ss;
  write_samples(ss, three_samples());
  EXPECT_EQ(ss.str(),
            "# pubbench-samples v1\n"
            "run_id,topic_id,publisher_node,subscriber_node,seq,publish_ts_ns,receive_ts_ns,latency_ns,status\n"
            "run-a,0,0,1,0,1000000000,1000014032,14032,IN_TIME\n"
            "run-a,0,0,1,1,1100000000,1220000000,120000000,LATE\n"
            "run-a,0,0,1,2,1200000000,,,LOST\n");
}

TEST(Csv, EmptyListIsHeaderOnly) {
  std::stringstream ss;
  write_publishers(ss, {});
  EXPECT_EQ(ss.str(), "# pubbench-publishers v1\nrun_id,topic_id,publisher_node,seq,scheduled_ns,publish_ts_ns,send_status\n");
  EXPECT_TRUE(read_publishers(ss).empty());
}

TEST(Csv, CorruptedStatusNamesTheRow) {
  std::stringstream ss;
  write_samples(ss, three_samples());
  auto text = ss.str();
  text.replace(text.find("LATE"), 4, "LAET");
  std::stringstream in(text);
  try {
    read_samples(in);
    FAIL();
  } catch (const CsvError& e) {
    EXPECT_EQ(e.row(), 4U);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("LAET"), std::string::npos);
    EXPECT_EQ(e.in("samples.csv").row(), 4U);
  }
}

std::string corrupt(std::string text, std::string_view from, std::string_view to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

TEST(Csv, MalformedInputs) {
  std::stringstream ss;
  write_samples(ss, three_samples());
  const auto good = ss.str();
  const auto fails = [](const std::string& text) {
    std::stringstream in(text);
    EXPECT_THROW(read_samples(in), CsvError) << text;
  };
  fails(corrupt(good, "14032,IN", "14.5,IN"));            // non-integer
  fails(corrupt(good, "1000014032,", "x,"));              // non-integer timestamp
  fails(corrupt(good, ",LOST", "LOST"));                  // field count
  fails(corrupt(good, ",latency_ns", ""));                // missing column
  fails(corrupt(good, "# pubbench-samples v1", "# pubbench-samples v2"));
  fails(corrupt(good, "1200000000,,,", "1200000000,5,5,"));  // LOST with a timestamp
  fails(corrupt(good, "1000014032,14032", ",14032"));       // delivered without receive time
  fails("");
}

TEST(Csv, ColumnsAreFoundByName) {
  std::stringstream in(
      "# pubbench-traces v1\n"
      "ts_ns,stage,seq,topic_id,node_id,run_id\n"
      "5,APP_PUBLISH,0,0,0,r\n");
  const auto t = read_traces(in);
  ASSERT_EQ(t.size(), 1U);
  EXPECT_EQ(t[0], (TraceEvent{"r", 0, 0, 0, stack::Stage::kAppPublish, 5}));
}

TEST(Csv, RandomizedRoundTripAndCanonicalOrder) {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 20; ++round) {
    std::vector<SampleRecord> samples;
    std::vector<PublisherRecord> pubs;
    std::vector<TraceEvent> traces;
    for (int i = 0; i < 200; ++i) {
      SampleRecord s;
      s.run_id = "run,\"q\"";
      s.topic_id = static_cast<std::uint16_t>(rng() % 5);
      s.publisher_node = static_cast<std::uint16_t>(rng() % 5);
      s.subscriber_node = static_cast<std::uint16_t>(rng() % 64);
      s.seq = static_cast<std::uint32_t>(rng());
      s.publish_ts_ns = static_cast<std::int64_t>(rng() >> 1U);
      s.status = static_cast<SampleStatus>(rng() % 3);
      if (s.status != SampleStatus::kLost) {
        s.latency_ns = static_cast<std::int64_t>(rng() % 1'000'000'000);
        s.receive_ts_ns = s.publish_ts_ns + 7;
      }
      samples.push_back(s);

      PublisherRecord p{"r", s.topic_id, s.publisher_node, s.seq, static_cast<std::int64_t>(rng() % 100),
                        std::nullopt, static_cast<SendStatus>(rng() % 3)};
      if (p.send_status != SendStatus::kUnsent) p.publish_ts_ns = -static_cast<std::int64_t>(rng() % 100);
      pubs.push_back(p);
      traces.push_back({"r", static_cast<std::uint16_t>(rng()), s.topic_id, s.seq,
                        stack::kAllStages[rng() % stack::kStageCount], static_cast<std::int64_t>(rng() >> 2U)});
    }
    const auto sorted = [](auto v, auto order) {
      std::stable_sort(v.begin(), v.end(), order);
      return v;
    };
    EXPECT_EQ(roundtrip(samples, write_samples, read_samples), sorted(samples, stack::sample_order));
    EXPECT_EQ(roundtrip(pubs, write_publishers, read_publishers), sorted(pubs, stack::publisher_order));
    EXPECT_EQ(roundtrip(traces, write_traces, read_traces), sorted(traces, stack::trace_order));

    // Emitting what was loaded reproduces the file byte for byte.
    std::stringstream a;
    write_traces(a, traces);
    const auto first = a.str();
    std::stringstream b;
    write_traces(b, read_traces(a));
    EXPECT_EQ(b.str(), first);
  }
}

TEST(Csv, ReportAndIndexRoundTrip) {
  const std::vector<ReportRow> rows = {{"r", "latency_mean_ns", "all", "14032"},
                                       {"r", "layer_share", "SERIALIZE_BEGIN>SERIALIZE_END", "0.996"},
                                       {"r", "note", "with,comma", "\"quoted\"\nline"}};
  EXPECT_EQ(roundtrip(rows, write_report, read_report), rows);
  const std::vector<IndexRow> index = {{"a", "ok", "0123456789abcdef", ""},
                                       {"b", "failed", "fedcba9876543210", "node 1 startup failed: bind"}};
  EXPECT_EQ(roundtrip(index, write_index, read_index), index);
}

TEST(Csv, FilesAndMissingPaths) {
  const auto dir = std::filesystem::temp_directory_path() / "pubbench_csv_test";
  std::filesystem::create_directories(dir);
  const auto s = three_samples();
  emit_samples(dir / "samples.csv", s);
  EXPECT_EQ(load_samples(dir / "samples.csv"), s);
  try {
    load_samples(dir / "absent.csv");
    FAIL();
  } catch (const CsvError& e) {
    EXPECT_NE(std::string(e.what()).find("absent.csv"), std::string::npos);
  }
  EXPECT_THROW(emit_samples(dir / "no" / "such" / "dir.csv", s), CsvError);
  std::filesystem::remove_all(dir);
}

TEST(Summary, DecimalFormatting) {
  EXPECT_EQ(format_decimal(0.0), "0");
  EXPECT_EQ(format_decimal(0.88), "0.88");
  EXPECT_EQ(format_decimal(100.0), "100");
  EXPECT_EQ(format_decimal(1.0 / 3.0), "0.3333333333333333");
}

}  // namespace
}  // namespace pubbench::report
