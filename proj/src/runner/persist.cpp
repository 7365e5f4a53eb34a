#include <fstream>
#include <ostream>
#include <sstream>

#include "pubbench/analysis/analysis.hpp"
#include "pubbench/report/csv.hpp"
#include "pubbench/report/summary.hpp"
#include "pubbench/runner/runner.hpp"
#include "pubbench/transport/fragment.hpp"

namespace pubbench::runner {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw RunError("cannot write '" + path.string() + "'");
}

void make_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RunError("cannot create '" + dir.string() + "': " + ec.message());
}

}  // namespace

std::string config_hash(const model::BenchmarkConfig& config) {
  const auto text = model::format_config(config);
  const auto digest = transport::digest_bytes(
      std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << digest;
  return out.str();
}

std::string summary_text(const RunArtifacts& a) {
  const auto& cfg = a.config;
  std::uint64_t sent = 0;
  std::uint64_t unsent = 0;
  for (const auto& p : a.publisher_records) ++(p.send_status == stack::SendStatus::kUnsent ? unsent : sent);
  std::uint64_t delivered = 0;
  std::uint64_t lost = 0;
  for (const auto& s : a.samples) ++(s.status == stack::SampleStatus::kLost ? lost : delivered);

  std::ostringstream out;
  out << "run_id: " << cfg.run_id << '\n'
      << "backend: " << to_string(cfg.backend) << '\n'
      << "topology: " << to_string(cfg.topology_kind) << " with " << cfg.node_count << " nodes\n"
      << "payload_bytes: " << cfg.payload_bytes << '\n'
      << "frequency_hz: " << cfg.frequency_hz << '\n'
      << "reliability: " << to_string(cfg.reliability) << '\n'
      << "scheduled: " << a.publisher_records.size() << '\n'
      << "sent: " << sent << '\n'
      << "unsent: " << unsent << '\n'
      << "delivered: " << delivered << '\n'
      << "lost: " << lost << '\n'
      << "datagrams_sent: " << a.counters.data_sent << '\n'
      << "nacks_sent: " << a.counters.nack_sent << '\n'
      << "fragments_resent: " << a.resent << '\n'
      << "datagrams_dropped: " << a.counters.dropped << '\n'
      << "datagrams_refused: " << a.counters.refused << '\n'
      << "messages_abandoned: " << a.abandoned << '\n'
      << "malformed_datagrams: " << a.malformed << '\n';
  out << "diagnostics: " << a.diagnostics.size() << '\n';
  constexpr std::size_t kShown = 20;
  for (std::size_t i = 0; i < a.diagnostics.size() && i < kShown; ++i) out << "  " << a.diagnostics[i] << '\n';
  return out.str();
}

void write_run_directory(const fs::path& dir, const RunArtifacts& artifacts) {
  make_directory(dir);
  const auto report = analysis::analyze(artifacts.config, artifacts.samples, artifacts.publisher_records,
                                        artifacts.traces);
  try {
    write_text(dir / "config.txt", model::format_config(artifacts.config));
    report::emit_samples(dir / "samples.csv", artifacts.samples);
    report::emit_publishers(dir / "publishers.csv", artifacts.publisher_records);
    report::emit_traces(dir / "traces.csv", artifacts.traces);
    write_text(dir / "summary.txt", summary_text(artifacts));
    report::emit_report(dir / "report.csv", report::report_rows(report));
    write_text(dir / "report.txt", report::report_text(report));
  } catch (const report::CsvError& e) {
    throw RunError(e.what());
  }
}

RunDirectory load_run_directory(const fs::path& dir) {
  RunDirectory run;
  run.config = model::validate_config(model::ConfigDocument::load((dir / "config.txt").string()));
  run.samples = report::load_samples(dir / "samples.csv");
  run.publisher_records = report::load_publishers(dir / "publishers.csv");
  run.traces = report::load_traces(dir / "traces.csv");
  return run;
}

std::vector<SweepEntry> run_sweep(const std::vector<model::BenchmarkConfig>& configs, const fs::path& out_dir,
                                  const RunOptions& options, std::ostream* progress) {
  make_directory(out_dir);
  std::vector<SweepEntry> entries;
  std::vector<report::IndexRow> index;
  const auto write_index = [&] {
    try {
      report::emit_index(out_dir / "index.csv", index);
    } catch (const report::CsvError& e) {
      throw RunError(e.what());
    }
  };
  write_index();

  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& config = configs[i];
    SweepEntry entry{config.run_id, "ok", config_hash(config), ""};
    if (progress) *progress << "[" << (i + 1) << "/" << configs.size() << "] " << config.run_id << std::flush;
    std::optional<RunArtifacts> artifacts;
    try {
      artifacts = run_benchmark(config, options);
    } catch (const std::exception& e) {
      entry.status = "failed";
      entry.detail = e.what();
    }
    if (artifacts) {
      try {
        write_run_directory(out_dir / config.run_id, *artifacts);
      } catch (const RunError&) {
        throw;
      } catch (const std::exception& e) {
        entry.status = "failed";
        entry.detail = e.what();
      }
    }
    if (progress) *progress << " " << entry.status << (entry.detail.empty() ? "" : ": " + entry.detail) << '\n';
    index.push_back(report::IndexRow{entry.run_id, entry.status, entry.config_hash, entry.detail});
    entries.push_back(std::move(entry));
    write_index();
  }
  return entries;
}

std::vector<SweepEntry> run_sweep(const model::SweepMatrix& matrix, const fs::path& out_dir,
                                  const RunOptions& options, std::ostream* progress) {
  return run_sweep(model::expand_sweep(matrix), out_dir, options, progress);
}

}  // namespace pubbench::runner
