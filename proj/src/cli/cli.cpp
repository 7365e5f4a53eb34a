#include "pubbench/cli/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include "pubbench/analysis/analysis.hpp"
#include "pubbench/model/config.hpp"
#include "pubbench/model/sweep.hpp"
#include "pubbench/report/csv.hpp"
#include "pubbench/report/summary.hpp"
#include "pubbench/runner/runner.hpp"

namespace pubbench::cli {

namespace {

namespace fs = std::filesystem;

const std::map<std::string_view, std::string_view> kAliases = {
    {"node_count", "--nodes"},
    {"topology_kind", "--topology"},
    {"payload_bytes", "--payload"},
    {"frequency_hz", "--frequency"},
    {"duration_s", "--duration"},
};

bool is_dimension(std::string_view key) {
  return key == "node_count" || key == "topology_kind" || key == "payload_bytes" || key == "frequency_hz";
}

/// One optional string flag per config key, collected as raw overrides.
struct Overrides {
  std::map<std::string, std::string> values;

  void attach(CLI::App& app) {
    for (const auto key : model::config_keys()) {
      std::string name = "--" + std::string(key);
      std::replace(name.begin(), name.end(), '_', '-');
      if (const auto alias = kAliases.find(key); alias != kAliases.end()) name += "," + std::string(alias->second);
      app.add_option_function<std::string>(
          name, [this, k = std::string(key)](const std::string& v) { values[k] = v; },
          "override " + std::string(key));
    }
  }
};

fs::path default_out() {
  if (const char* env = std::getenv("PUBBENCH_OUT"); env != nullptr && *env != '\0') return env;
  return "results";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  file << text;
  file.flush();
  if (!file) throw runner::RunError("cannot write '" + path.string() + "'");
}

analysis::RunReport analyze_run(const fs::path& dir, const analysis::AnalysisOptions& options) {
  const auto run = runner::load_run_directory(dir);
  return analysis::analyze(run.config, run.samples, run.publisher_records, run.traces, options);
}

int cmd_run(const std::string& config_path, const Overrides& overrides, const fs::path& out_dir, bool verify,
            bool in_time_only, std::ostream& out) {
  model::ConfigDocument doc;
  if (!config_path.empty()) doc = model::ConfigDocument::load(config_path);
  for (const auto& [key, value] : overrides.values) doc.set(key, value);
  const auto config = model::validate_config(doc);

  const auto artifacts = runner::run_benchmark(config, runner::RunOptions{verify});
  const auto dir = out_dir / config.run_id;
  runner::write_run_directory(dir, artifacts);

  out << runner::summary_text(artifacts);
  const auto wall_ms = static_cast<double>(artifacts.wall_end_ns - artifacts.wall_start_ns) / 1e6;
  out << "wall_time_ms: " << wall_ms << '\n';
  if (verify) {
    std::map<std::pair<std::uint16_t, std::uint32_t>, std::uint64_t> published;
    for (const auto& d : artifacts.published_digests) published[{d.topic_id, d.seq}] = d.digest;
    std::size_t mismatched = 0;
    for (const auto& d : artifacts.received_digests) {
      const auto it = published.find({d.topic_id, d.seq});
      if (it == published.end() || it->second != d.digest) ++mismatched;
    }
    out << "payload_check: " << artifacts.received_digests.size() - mismatched << " of "
        << artifacts.received_digests.size() << " deliveries match the published payload\n";
  }
  analysis::AnalysisOptions options;
  options.in_time_only = in_time_only;
  const auto report = analysis::analyze(artifacts.config, artifacts.samples, artifacts.publisher_records,
                                        artifacts.traces, options);
  out << report::report_text(report);
  out << "artifacts: " << dir.string() << '\n';
  return kExitOk;
}

int cmd_sweep(const std::string& matrix_path, const std::string& preset, const Overrides& overrides,
              const fs::path& out_dir, bool dry_run, bool verify, std::ostream& out) {
  auto matrix = preset.empty() ? model::SweepMatrix::load(matrix_path) : model::preset_matrix(preset);
  for (const auto& [key, value] : overrides.values) {
    if (!is_dimension(key)) {
      matrix.fixed.set(key, value);
      continue;
    }
    const auto parsed = model::SweepMatrix::parse(key + " = " + value);
    if (key == "node_count") matrix.node_counts = parsed.node_counts;
    if (key == "topology_kind") matrix.topology_kinds = parsed.topology_kinds;
    if (key == "payload_bytes") matrix.payload_bytes = parsed.payload_bytes;
    if (key == "frequency_hz") matrix.frequencies_hz = parsed.frequencies_hz;
  }
  const auto configs = model::expand_sweep(matrix);
  if (dry_run) {
    for (const auto& c : configs) out << c.run_id << '\n';
    out << configs.size() << " configs\n";
    return kExitOk;
  }
  const auto entries = runner::run_sweep(configs, out_dir, runner::RunOptions{verify}, &out);
  const auto failed = std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.status != "ok"; });
  out << entries.size() << " runs, " << failed << " failed, index: " << (out_dir / "index.csv").string() << '\n';
  return failed == 0 ? kExitOk : kExitRuntime;
}

int cmd_analyze(const fs::path& in_dir, const std::string& out_arg, bool in_time_only, std::int64_t bin_ms,
                std::ostream& out) {
  analysis::AnalysisOptions options;
  options.in_time_only = in_time_only;
  options.timeline_bin_ns = bin_ms * 1'000'000;

  std::vector<fs::path> runs;
  if (fs::exists(in_dir / "index.csv")) {
    for (const auto& row : report::load_index(in_dir / "index.csv")) {
      if (row.status == "ok") runs.push_back(in_dir / row.run_id);
    }
  } else {
    runs.push_back(in_dir);
  }
  for (const auto& dir : runs) {
    const auto rep = analyze_run(dir, options);
    const auto target = out_arg.empty() ? dir : (runs.size() == 1 ? fs::path(out_arg) : fs::path(out_arg) / dir.filename());
    std::error_code ec;
    fs::create_directories(target, ec);
    if (ec) throw runner::RunError("cannot create '" + target.string() + "': " + ec.message());
    report::emit_report(target / "report.csv", report::report_rows(rep));
    write_text(target / "report.txt", report::report_text(rep));
    out << report::report_text(rep);
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"pub/sub middleware latency benchmark", "pubbench"};
  app.require_subcommand(1, 1);

  auto* run = app.add_subcommand("run", "execute one benchmark run");
  std::string config_path;
  std::string out_dir = default_out().string();
  bool verify = false;
  bool in_time_only = false;
  Overrides run_overrides;
  run->add_option("--config,-c", config_path, "config file (key = value lines)");
  run->add_option("--out,-o", out_dir, "output directory");
  run->add_flag("--verify-payloads", verify, "compare delivered payloads with published ones");
  run->add_flag("--in-time-only", in_time_only, "exclude LATE samples from the printed latency statistics");
  run_overrides.attach(*run);

  auto* sweep = app.add_subcommand("sweep", "execute a parameter matrix");
  std::string matrix_path;
  std::string preset;
  bool dry_run = false;
  Overrides sweep_overrides;
  auto* matrix_opt = sweep->add_option("--matrix,-m", matrix_path, "matrix file");
  auto* preset_opt = sweep->add_option("--preset", preset, "built-in matrix: table1 or table2");
  matrix_opt->excludes(preset_opt);
  sweep->add_option("--out,-o", out_dir, "output directory");
  sweep->add_flag("--dry-run", dry_run, "list the expanded run ids without running");
  sweep->add_flag("--verify-payloads", verify, "compare delivered payloads with published ones");
  sweep_overrides.attach(*sweep);

  auto* analyze = app.add_subcommand("analyze", "recompute reports from persisted artifacts");
  std::string in_dir;
  std::string analyze_out;
  std::int64_t bin_ms = 1000;
  analyze->add_option("--in,-i", in_dir, "run directory, or sweep directory with index.csv")->required();
  analyze->add_option("--out,-o", analyze_out, "where to write report.csv/report.txt (default: in place)");
  analyze->add_flag("--in-time-only", in_time_only, "exclude LATE samples from latency statistics");
  analyze->add_option("--bin-ms", bin_ms, "timeline bin width in milliseconds")->check(CLI::PositiveNumber);

  auto* version = app.add_subcommand("version", "print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (version->parsed()) {
      out << "pubbench " << kVersion << '\n';
      return kExitOk;
    }
    if (run->parsed()) return cmd_run(config_path, run_overrides, out_dir, verify, in_time_only, out);
    if (sweep->parsed()) {
      if (matrix_path.empty() && preset.empty()) {
        err << "sweep: one of --matrix or --preset is required\n";
        return kExitUsage;
      }
      return cmd_sweep(matrix_path, preset, sweep_overrides, out_dir, dry_run, verify, out);
    }
    if (analyze->parsed()) return cmd_analyze(in_dir, analyze_out, in_time_only, bin_ms, out);
  } catch (const model::ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace pubbench::cli
