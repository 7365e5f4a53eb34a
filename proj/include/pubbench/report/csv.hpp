#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pubbench/stack/records.hpp"

namespace pubbench::report {

/// Parse or I/O failure. `row()` is the 1-based line number in the file,
/// or 0 when the error is not tied to a line.
class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& message, std::size_t row = 0)
      : std::runtime_error(row == 0 ? message : "line " + std::to_string(row) + ": " + message), row_(row) {}
  std::size_t row() const { return row_; }

  /// Same error with `prefix` (e.g. a file name) in front of the message.
  CsvError in(const std::string& prefix) const { return CsvError(prefix + ": " + what(), row_, Prefixed{}); }

 private:
  struct Prefixed {};
  CsvError(const std::string& message, std::size_t row, Prefixed) : std::runtime_error(message), row_(row) {}

  std::size_t row_;
};

enum class FileKind { kSamples, kPublishers, kTraces, kReport, kIndex };

/// Column names, in file order.
std::span<const std::string_view> columns(FileKind kind);

/// First line of every file: "# pubbench-<kind> v1".
std::string version_line(FileKind kind);

struct ReportRow {
  std::string run_id;
  std::string metric;
  std::string group;
  std::string value;  // integer nanoseconds, a count, or a decimal percentage/ratio

  bool operator==(const ReportRow&) const = default;
};

struct IndexRow {
  std::string run_id;
  std::string status;
  std::string config_hash;
  std::string detail;

  bool operator==(const IndexRow&) const = default;
};

// Writers emit the version line, the header and one row per record. Sample,
// publisher and trace rows are written in canonical order regardless of the
// input order. Timestamps are decimal nanoseconds; absent values are empty.
void write_samples(std::ostream& out, std::span<const stack::SampleRecord> records);
void write_publishers(std::ostream& out, std::span<const stack::PublisherRecord> records);
void write_traces(std::ostream& out, std::span<const stack::TraceEvent> records);
void write_report(std::ostream& out, std::span<const ReportRow> rows);
void write_index(std::ostream& out, std::span<const IndexRow> rows);

std::vector<stack::SampleRecord> read_samples(std::istream& in);
std::vector<stack::PublisherRecord> read_publishers(std::istream& in);
std::vector<stack::TraceEvent> read_traces(std::istream& in);
std::vector<ReportRow> read_report(std::istream& in);
std::vector<IndexRow> read_index(std::istream& in);

// File wrappers; throw CsvError naming the path on open/write failure.
void emit_samples(const std::filesystem::path& path, std::span<const stack::SampleRecord> records);
void emit_publishers(const std::filesystem::path& path, std::span<const stack::PublisherRecord> records);
void emit_traces(const std::filesystem::path& path, std::span<const stack::TraceEvent> records);
void emit_report(const std::filesystem::path& path, std::span<const ReportRow> rows);
void emit_index(const std::filesystem::path& path, std::span<const IndexRow> rows);

std::vector<stack::SampleRecord> load_samples(const std::filesystem::path& path);
std::vector<stack::PublisherRecord> load_publishers(const std::filesystem::path& path);
std::vector<stack::TraceEvent> load_traces(const std::filesystem::path& path);
std::vector<ReportRow> load_report(const std::filesystem::path& path);
std::vector<IndexRow> load_index(const std::filesystem::path& path);

}  // namespace pubbench::report
