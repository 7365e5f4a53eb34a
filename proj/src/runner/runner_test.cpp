#include <gtest/gtest.h>

#include <sys/socket.h>
#include <netinet/in.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pubbench/analysis/analysis.hpp"
#include "pubbench/model/topology.hpp"
#include "pubbench/report/csv.hpp"
#include "pubbench/runner/runner.hpp"

namespace pubbench::runner {
namespace {

namespace fs = std::filesystem;
using stack::SampleStatus;
using stack::SendStatus;
using stack::Stage;

struct TempDir {
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("pubbench_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path path;
};

model::BenchmarkConfig small(std::uint32_t nodes = 2, model::TopologyKind kind = model::TopologyKind::kPaired) {
  model::BenchmarkConfig c;
  c.node_count = nodes;
  c.topology_kind = kind;
  c.payload_bytes = 16;
  c.frequency_hz = 10;
  c.duration_s = 6;
  c.seed = 42;
  c.run_id = model::default_run_id(c);
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Runner, OneToOneAccounting) {
  const auto a = run_benchmark(small());
  EXPECT_EQ(a.publisher_records.size(), 60U);
  EXPECT_EQ(a.samples.size(), 60U);
  for (const auto& s : a.samples) EXPECT_EQ(s.status, SampleStatus::kInTime);
  for (const auto& p : a.publisher_records) EXPECT_EQ(p.send_status, SendStatus::kSentInTime);
  EXPECT_TRUE(a.diagnostics.empty());
}

TEST(Runner, TimingInvariants) {
  auto c = small(4, model::TopologyKind::kManyToOne);
  c.payload_bytes = 200'000;
  const auto a = run_benchmark(c);
  const std::int64_t t0 = std::int64_t{c.discovery_wait_ms} * 1'000'000;
  for (const auto& e : a.traces) {
    if (e.stage == Stage::kAppPublish) {
      EXPECT_GE(e.ts_ns, t0);
    }
    EXPECT_GE(e.ts_ns, 0);
  }
  for (const auto& p : a.publisher_records) {
    EXPECT_EQ(p.scheduled_ns, t0 + static_cast<std::int64_t>(p.seq) * c.period_ns());
  }
  // Every sample refers to a sent publisher record with the same publish time.
  std::map<std::pair<std::uint16_t, std::uint32_t>, std::int64_t> sent;
  for (const auto& p : a.publisher_records) {
    if (p.publish_ts_ns) sent[{p.topic_id, p.seq}] = *p.publish_ts_ns;
  }
  for (const auto& s : a.samples) {
    ASSERT_TRUE(sent.contains({s.topic_id, s.seq}));
    EXPECT_EQ(sent.at({s.topic_id, s.seq}), s.publish_ts_ns);
  }
  // Callbacks on one node never overlap.
  std::map<std::uint16_t, std::vector<std::pair<std::int64_t, std::int64_t>>> spans;
  std::map<std::tuple<std::uint16_t, std::uint16_t, std::uint32_t>, std::int64_t> begins;
  for (const auto& e : a.traces) {
    if (e.stage == Stage::kCallbackBegin) begins[{e.node_id, e.topic_id, e.seq}] = e.ts_ns;
  }
  for (const auto& e : a.traces) {
    if (e.stage == Stage::kCallbackEnd) spans[e.node_id].emplace_back(begins.at({e.node_id, e.topic_id, e.seq}), e.ts_ns);
  }
  for (auto& [node, v] : spans) {
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LE(v[i - 1].second, v[i].first);
  }
}

TEST(Runner, TotalLossBestEffort) {
  auto c = small(4, model::TopologyKind::kOneToMany);
  c.reliability = model::Reliability::kBestEffort;
  c.loss_prob = 1.0;
  const auto a = run_benchmark(c);
  EXPECT_EQ(a.publisher_records.size(), 60U);
  EXPECT_EQ(a.samples.size(), 180U);
  for (const auto& s : a.samples) EXPECT_EQ(s.status, SampleStatus::kLost);
  const auto counts = analysis::categorize(a.samples, a.publisher_records, c.period_ns());
  EXPECT_EQ(counts.lost, 3 * counts.sent());
  EXPECT_EQ(counts.in_time, 0U);
}

TEST(Runner, SimRunsAreDeterministic) {
  auto c = small(4, model::TopologyKind::kOneToMany);
  c.payload_bytes = 150'000;
  c.loss_prob = 0.02;
  TempDir tmp("runner_det");
  write_run_directory(tmp.path / "a", run_benchmark(c));
  write_run_directory(tmp.path / "b", run_benchmark(c));
  for (const auto* f : {"samples.csv", "publishers.csv", "traces.csv", "report.csv", "summary.txt", "config.txt"}) {
    EXPECT_EQ(slurp(tmp.path / "a" / f), slurp(tmp.path / "b" / f)) << f;
  }
  c.seed = 43;
  write_run_directory(tmp.path / "c", run_benchmark(c));
  EXPECT_NE(slurp(tmp.path / "a" / "samples.csv"), slurp(tmp.path / "c" / "samples.csv"));
}

TEST(Runner, PersistAndLoad) {
  const auto a = run_benchmark(small());
  TempDir tmp("runner_persist");
  write_run_directory(tmp.path / "run", a);
  const auto d = load_run_directory(tmp.path / "run");
  EXPECT_EQ(d.config, a.config);
  EXPECT_EQ(d.samples, a.samples);
  EXPECT_EQ(d.publisher_records, a.publisher_records);
  EXPECT_EQ(d.traces, a.traces);
  EXPECT_THROW(load_run_directory(tmp.path / "absent"), std::exception);
}

TEST(Runner, ConfigHashIsStable) {
  const auto c = small();
  EXPECT_EQ(config_hash(c).size(), 16U);
  EXPECT_EQ(config_hash(c), config_hash(small()));
  auto d = c;
  d.seed = 7;
  EXPECT_NE(config_hash(c), config_hash(d));
}

TEST(Runner, InvalidConfigIsARunError) {
  auto c = small();
  c.node_count = 3;
  EXPECT_THROW(run_benchmark(c), RunError);
}

TEST(Runner, MergeAddsLostSamples) {
  const auto topology = model::build_topology(3, model::TopologyKind::kOneToMany);
  RunArtifacts artifacts;
  artifacts.config = small(3, model::TopologyKind::kOneToMany);
  std::vector<stack::NodeRecords> records(3);
  records[0].publisher_records = {{"r", 0, 0, 0, 0, 10, SendStatus::kSentInTime},
                                  {"r", 0, 0, 1, 100, std::nullopt, SendStatus::kUnsent}};
  records[1].samples = {{"r", 0, 0, 1, 0, 10, 20, 10, SampleStatus::kInTime}};
  merge_records(topology, artifacts, std::move(records));
  ASSERT_EQ(artifacts.samples.size(), 2U);
  EXPECT_EQ(artifacts.samples[1].subscriber_node, 2);
  EXPECT_EQ(artifacts.samples[1].status, SampleStatus::kLost);
  EXPECT_EQ(artifacts.samples[1].publish_ts_ns, 10);
}

/// Holds a loopback UDP port so a run that wants it fails at startup.
struct OccupiedPort {
  OccupiedPort() {
    fd = ::socket(AF_INET, SOCK_DGRAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
    socklen_t len = sizeof addr;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    port = ntohs(addr.sin_port);
  }
  ~OccupiedPort() { ::close(fd); }
  int fd = -1;
  std::uint16_t port = 0;
};

TEST(Sweep, FailingRunIsRecordedAndSweepContinues) {
  OccupiedPort busy;
  std::vector<model::BenchmarkConfig> configs;
  for (int i = 0; i < 3; ++i) {
    auto c = small();
    c.duration_s = 0.5;
    c.discovery_wait_ms = 50;
    c.drain_ms = 50;
    c.run_id = "run" + std::to_string(i);
    if (i == 1) {
      c.backend = model::Backend::kUdp;
      c.base_port = busy.port;
    }
    configs.push_back(c);
  }
  TempDir tmp("sweep_fault");
  std::stringstream progress;
  const auto entries = run_sweep(configs, tmp.path, {}, &progress);
  ASSERT_EQ(entries.size(), 3U);
  EXPECT_EQ(entries[0].status, "ok");
  EXPECT_EQ(entries[1].status, "failed");
  EXPECT_NE(entries[1].detail.find("startup failed"), std::string::npos);
  EXPECT_EQ(entries[2].status, "ok");
  const auto index = report::load_index(tmp.path / "index.csv");
  ASSERT_EQ(index.size(), 3U);
  EXPECT_EQ(index[1].status, "failed");
  EXPECT_EQ(index[0].config_hash, config_hash(configs[0]));
  EXPECT_TRUE(fs::exists(tmp.path / "run0" / "samples.csv"));
  EXPECT_TRUE(fs::exists(tmp.path / "run2" / "summary.txt"));
}

TEST(Sweep, UnwritableOutputAborts) {
  TempDir tmp("sweep_unwritable");
  const auto blocker = tmp.path / "file";
  std::ofstream(blocker) << "x";
  auto c = small();
  c.duration_s = 0.2;
  EXPECT_THROW(run_sweep({c, c}, blocker / "sub"), RunError);
}

TEST(Sweep, EmptyMatrixIsAnError) {
  TempDir tmp("sweep_empty");
  model::SweepMatrix m;
  EXPECT_THROW(run_sweep(m, tmp.path), model::ConfigError);
}

}  // namespace
}  // namespace pubbench::runner
