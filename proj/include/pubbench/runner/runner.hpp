#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "pubbench/model/config.hpp"
#include "pubbench/model/sweep.hpp"
#include "pubbench/stack/node.hpp"
#include "pubbench/stack/records.hpp"
#include "pubbench/transport/channel.hpp"

namespace pubbench::runner {

class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  // Record a digest of every published and every delivered payload.
  bool verify_payloads = false;
};

struct RunArtifacts {
  model::BenchmarkConfig config;
  std::vector<stack::SampleRecord> samples;
  std::vector<stack::PublisherRecord> publisher_records;
  std::vector<stack::TraceEvent> traces;
  std::int64_t wall_start_ns = 0;
  std::int64_t wall_end_ns = 0;

  std::vector<stack::PayloadDigest> published_digests;
  std::vector<stack::PayloadDigest> received_digests;
  std::vector<std::string> diagnostics;
  transport::TransportCounters counters;
  std::uint64_t abandoned = 0;
  std::uint64_t malformed = 0;
  std::uint64_t resent = 0;
};

/// Runs one benchmark. Subscribers start first; publishers start their
/// timers at a common t0 after the discovery wait, publish for the run
/// duration, and every node keeps serving input for the drain window.
/// SIM runs execute on virtual time and are fully deterministic.
RunArtifacts run_benchmark(const model::BenchmarkConfig& config, const RunOptions& options = {});

/// Adds a LOST sample for every sent message a subscriber never received,
/// drops samples of unsent messages, and sorts everything canonically.
void merge_records(const model::TopologySpec& topology, RunArtifacts& artifacts,
                   std::vector<stack::NodeRecords> records);

// ---- persistence ----

struct RunDirectory {
  model::BenchmarkConfig config;
  std::vector<stack::SampleRecord> samples;
  std::vector<stack::PublisherRecord> publisher_records;
  std::vector<stack::TraceEvent> traces;
};

/// Writes config.txt, samples.csv, publishers.csv, traces.csv, summary.txt,
/// report.csv and report.txt under `dir`. Throws RunError if unwritable.
void write_run_directory(const std::filesystem::path& dir, const RunArtifacts& artifacts);
RunDirectory load_run_directory(const std::filesystem::path& dir);

std::string summary_text(const RunArtifacts& artifacts);

/// FNV-1a over the canonical config text, as 16 hex digits.
std::string config_hash(const model::BenchmarkConfig& config);

struct SweepEntry {
  std::string run_id;
  std::string status;  // "ok" or "failed"
  std::string config_hash;
  std::string detail;
};

/// Runs every config in order, one at a time, writing one directory per
/// run and rewriting `<out_dir>/index.csv` after each. A failing run is
/// recorded and the sweep continues; an unwritable output aborts it.
std::vector<SweepEntry> run_sweep(const std::vector<model::BenchmarkConfig>& configs,
                                  const std::filesystem::path& out_dir, const RunOptions& options = {},
                                  std::ostream* progress = nullptr);
std::vector<SweepEntry> run_sweep(const model::SweepMatrix& matrix, const std::filesystem::path& out_dir,
                                  const RunOptions& options = {}, std::ostream* progress = nullptr);

}  // namespace pubbench::runner
