#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pubbench/cli/cli.hpp"
#include "pubbench/report/csv.hpp"

namespace pubbench::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "pubbench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("pubbench_cli_" + std::string(testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "c.cfg") << "node_count = 2\ntopology_kind = PAIRED\npayload_bytes = 16\nfrequency_hz = 10\n"
                                    "duration_s = 60\n";
  }
  void TearDown() override { fs::remove_all(dir); }
  fs::path dir;
};

TEST_F(Cli, Version) {
  const auto r = invoke({"version"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "pubbench 1.0.0\n");
}

TEST_F(Cli, RunSmoke) {
  const auto r = invoke({"run", "--config", (dir / "c.cfg").string(), "--duration", "6", "--backend", "sim", "--seed",
                         "42", "--out", dir.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("scheduled"), std::string::npos);
  const auto run = dir / "n2-paired-16b-10hz";
  for (const auto* f : {"config.txt", "samples.csv", "publishers.csv", "traces.csv", "summary.txt", "report.csv"}) {
    EXPECT_TRUE(fs::exists(run / f)) << f;
  }
  EXPECT_EQ(report::load_samples(run / "samples.csv").size(), 60U);
}

TEST_F(Cli, OutputDirectoryFromEnvironment) {
  ::setenv("PUBBENCH_OUT", (dir / "env").c_str(), 1);
  const auto r = invoke({"run", "-c", (dir / "c.cfg").string(), "--duration", "1", "--run-id", "x"});
  ::unsetenv("PUBBENCH_OUT");
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(dir / "env" / "x" / "samples.csv"));
}

TEST_F(Cli, UsageErrors) {
  const auto missing = invoke({"run", "--config", (dir / "missing.cfg").string()});
  EXPECT_EQ(missing.code, kExitUsage);
  EXPECT_NE(missing.err.find("not found"), std::string::npos);
  EXPECT_EQ(invoke({"run", "--bogus-flag", "1"}).code, kExitUsage);
  EXPECT_EQ(invoke({}).code, kExitUsage);
  EXPECT_EQ(invoke({"sweep"}).code, kExitUsage);
  EXPECT_EQ(invoke({"sweep", "--preset", "table1", "--matrix", "m.txt"}).code, kExitUsage);
  EXPECT_EQ(invoke({"run", "-c", (dir / "c.cfg").string(), "--nodes", "3"}).code, kExitUsage);
  EXPECT_EQ(invoke({"analyze", "--in", (dir / "nothing").string()}).code, kExitUsage);
}

TEST_F(Cli, PresetsExpand) {
  auto r = invoke({"sweep", "--preset", "table1", "--dry-run"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("\n6 configs\n"), std::string::npos);
  r = invoke({"sweep", "--preset", "table2", "--dry-run"});
  EXPECT_NE(r.out.find("\n100 configs\n"), std::string::npos);
  r = invoke({"sweep", "--preset", "table2", "--dry-run", "--nodes", "2"});
  EXPECT_NE(r.out.find("\n10 configs\n"), std::string::npos);
}

TEST_F(Cli, AnalyzeReproducesReport) {
  auto cfg = dir / "late.cfg";
  // Repaired messages wait out a 12 ms repair interval, past the 10 ms period.
  std::ofstream(cfg) << "node_count = 4\ntopology_kind = ONE_TO_MANY\npayload_bytes = 200000\nfrequency_hz = 100\n"
                        "duration_s = 1\nrun_id = late\nloss_prob = 0.1\nrepair_interval_ms = 12\n";
  ASSERT_EQ(invoke({"run", "-c", cfg.string(), "-o", dir.string()}).code, kExitOk);
  const auto run = dir / "late";
  const auto original = slurp(run / "report.csv");

  auto r = invoke({"analyze", "--in", run.string(), "--out", (dir / "again").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(slurp(dir / "again" / "report.csv"), original);

  r = invoke({"analyze", "--in", run.string(), "--out", (dir / "filtered").string(), "--in-time-only"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = report::load_report(dir / "filtered" / "report.csv");
  std::string count;
  std::string in_time;
  std::string late;
  for (const auto& row : rows) {
    if (row.group != "all") continue;
    if (row.metric == "latency_count") count = row.value;
    if (row.metric == "in_time") in_time = row.value;
    if (row.metric == "late") late = row.value;
  }
  EXPECT_NE(late, "0");
  EXPECT_EQ(count, in_time);
}

TEST_F(Cli, SweepRunsAndAnalyzesIndex) {
  std::ofstream(dir / "m.txt") << "node_count = 2, 4\ntopology_kind = PAIRED\npayload_bytes = 16\nfrequency_hz = 10\n"
                                  "duration_s = 1\n";
  auto r = invoke({"sweep", "-m", (dir / "m.txt").string(), "-o", (dir / "sw").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(report::load_index(dir / "sw" / "index.csv").size(), 2U);
  r = invoke({"analyze", "--in", (dir / "sw").string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
}

}  // namespace
}  // namespace pubbench::cli
