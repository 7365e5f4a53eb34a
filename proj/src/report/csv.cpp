#include "pubbench/report/csv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>

namespace pubbench::report {

namespace {

using namespace std::string_view_literals;

constexpr std::array kSampleColumns = {"run_id"sv,         "topic_id"sv,      "publisher_node"sv,
                                       "subscriber_node"sv, "seq"sv,           "publish_ts_ns"sv,
                                       "receive_ts_ns"sv,   "latency_ns"sv,    "status"sv};
constexpr std::array kPublisherColumns = {"run_id"sv, "topic_id"sv,      "publisher_node"sv, "seq"sv,
                                          "scheduled_ns"sv, "publish_ts_ns"sv, "send_status"sv};
constexpr std::array kTraceColumns = {"run_id"sv, "node_id"sv, "topic_id"sv, "seq"sv, "stage"sv, "ts_ns"sv};
constexpr std::array kReportColumns = {"run_id"sv, "metric"sv, "group"sv, "value_ns_or_pct"sv};
constexpr std::array kIndexColumns = {"run_id"sv, "status"sv, "config_hash"sv, "detail"sv};

std::string_view kind_name(FileKind kind) {
  switch (kind) {
    case FileKind::kSamples: return "samples";
    case FileKind::kPublishers: return "publishers";
    case FileKind::kTraces: return "traces";
    case FileKind::kReport: return "report";
    case FileKind::kIndex: return "index";
  }
  return "unknown";
}

void write_field(std::ostream& out, std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    out << field;
    return;
  }
  out << '"';
  for (const char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

template <typename T>
std::string num(T value) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

std::string opt(const std::optional<std::int64_t>& value) { return value ? num(*value) : std::string(); }

void write_row(std::ostream& out, std::initializer_list<std::string_view> fields) {
  bool first = true;
  for (const auto f : fields) {
    if (!first) out << ',';
    first = false;
    write_field(out, f);
  }
  out << '\n';
}

void write_head(std::ostream& out, FileKind kind) {
  out << version_line(kind) << '\n';
  const auto cols = columns(kind);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

// Splits one line; quoted fields may contain separators and doubled quotes.
std::vector<std::string> split_line(std::string_view line, std::size_t row) {
  std::vector<std::string> fields;
  std::string field;
  std::size_t i = 0;
  for (;;) {
    field.clear();
    if (i < line.size() && line[i] == '"') {
      ++i;
      for (;;) {
        if (i >= line.size()) throw CsvError("unterminated quoted field", row);
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        field += line[i++];
      }
      if (i < line.size() && line[i] != ',') throw CsvError("text after closing quote", row);
    } else {
      const auto comma = line.find(',', i);
      const auto end = comma == std::string_view::npos ? line.size() : comma;
      field.assign(line.substr(i, end - i));
      i = end;
    }
    fields.push_back(field);
    if (i >= line.size()) break;
    ++i;  // comma
  }
  return fields;
}

/// Column-addressed view of one parsed row.
class Row {
 public:
  Row(const std::vector<std::string>& fields, const std::vector<std::size_t>& index, std::span<const std::string_view> names,
      std::size_t line)
      : fields_(fields), index_(index), names_(names), line_(line) {}

  const std::string& text(std::size_t col) const { return fields_[index_[col]]; }

  template <typename T>
  T integer(std::size_t col) const {
    const auto& f = text(col);
    T value{};
    const auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
    if (f.empty() || ec != std::errc() || end != f.data() + f.size()) {
      throw CsvError("column " + std::string(names_[col]) + ": expected an integer, got '" + f + "'", line_);
    }
    return value;
  }

  std::optional<std::int64_t> optional_integer(std::size_t col) const {
    if (text(col).empty()) return std::nullopt;
    return integer<std::int64_t>(col);
  }

  [[noreturn]] void fail(const std::string& message) const { throw CsvError(message, line_); }

 private:
  const std::vector<std::string>& fields_;
  const std::vector<std::size_t>& index_;
  std::span<const std::string_view> names_;
  std::size_t line_;
};

void read_file(std::istream& in, FileKind kind, const std::function<void(const Row&)>& on_row) {
  std::string line;
  std::size_t line_no = 0;  // first line of the current record
  std::size_t lines_read = 0;
  // One record; a quoted field may span lines, so keep reading while the
  // quote count is odd.
  const auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    line_no = ++lines_read;
    std::string more;
    while (std::count(line.begin(), line.end(), '"') % 2 != 0) {
      if (!std::getline(in, more)) throw CsvError("unterminated quoted field", line_no);
      ++lines_read;
      line += '\n';
      line += more;
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next()) throw CsvError("empty file, expected '" + version_line(kind) + "'");
  if (line != version_line(kind)) throw CsvError("expected '" + version_line(kind) + "', got '" + line + "'", line_no);
  if (!next()) throw CsvError("missing header row", line_no + 1);

  const auto header = split_line(line, line_no);
  const auto names = columns(kind);
  std::vector<std::size_t> index;
  for (const auto name : names) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw CsvError("missing column '" + std::string(name) + "'", line_no);
    index.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  while (next()) {
    if (line.empty()) continue;
    const auto fields = split_line(line, line_no);
    if (fields.size() != header.size()) {
      throw CsvError("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()),
                     line_no);
    }
    on_row(Row(fields, index, names, line_no));
  }
}

template <typename T, typename Less>
std::vector<T> sorted(std::span<const T> records, Less less) {
  std::vector<T> copy(records.begin(), records.end());
  std::stable_sort(copy.begin(), copy.end(), less);
  return copy;
}

template <typename Write>
void emit(const std::filesystem::path& path, Write write) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CsvError("cannot open '" + path.string() + "' for writing");
  write(out);
  out.flush();
  if (!out) throw CsvError("write to '" + path.string() + "' failed");
}

template <typename Read>
auto load(const std::filesystem::path& path, Read read) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open '" + path.string() + "'");
  try {
    return read(in);
  } catch (const CsvError& e) {
    throw e.in(path.string());
  }
}

}  // namespace

std::span<const std::string_view> columns(FileKind kind) {
  switch (kind) {
    case FileKind::kSamples: return kSampleColumns;
    case FileKind::kPublishers: return kPublisherColumns;
    case FileKind::kTraces: return kTraceColumns;
    case FileKind::kReport: return kReportColumns;
    case FileKind::kIndex: return kIndexColumns;
  }
  return {};
}

std::string version_line(FileKind kind) { return "# pubbench-" + std::string(kind_name(kind)) + " v1"; }

void write_samples(std::ostream& out, std::span<const stack::SampleRecord> records) {
  write_head(out, FileKind::kSamples);
  for (const auto& r : sorted(records, stack::sample_order)) {
    write_row(out, {r.run_id, num(r.topic_id), num(r.publisher_node), num(r.subscriber_node), num(r.seq),
                    num(r.publish_ts_ns), opt(r.receive_ts_ns), opt(r.latency_ns), to_string(r.status)});
  }
}

void write_publishers(std::ostream& out, std::span<const stack::PublisherRecord> records) {
  write_head(out, FileKind::kPublishers);
  for (const auto& r : sorted(records, stack::publisher_order)) {
    write_row(out, {r.run_id, num(r.topic_id), num(r.publisher_node), num(r.seq), num(r.scheduled_ns),
                    opt(r.publish_ts_ns), to_string(r.send_status)});
  }
}

void write_traces(std::ostream& out, std::span<const stack::TraceEvent> records) {
  write_head(out, FileKind::kTraces);
  for (const auto& r : sorted(records, stack::trace_order)) {
    write_row(out, {r.run_id, num(r.node_id), num(r.topic_id), num(r.seq), to_string(r.stage), num(r.ts_ns)});
  }
}

void write_report(std::ostream& out, std::span<const ReportRow> rows) {
  write_head(out, FileKind::kReport);
  for (const auto& r : rows) write_row(out, {r.run_id, r.metric, r.group, r.value});
}

void write_index(std::ostream& out, std::span<const IndexRow> rows) {
  write_head(out, FileKind::kIndex);
  for (const auto& r : rows) write_row(out, {r.run_id, r.status, r.config_hash, r.detail});
}

std::vector<stack::SampleRecord> read_samples(std::istream& in) {
  std::vector<stack::SampleRecord> out;
  read_file(in, FileKind::kSamples, [&](const Row& row) {
    stack::SampleRecord r;
    r.run_id = row.text(0);
    r.topic_id = row.integer<std::uint16_t>(1);
    r.publisher_node = row.integer<std::uint16_t>(2);
    r.subscriber_node = row.integer<std::uint16_t>(3);
    r.seq = row.integer<std::uint32_t>(4);
    r.publish_ts_ns = row.integer<std::int64_t>(5);
    r.receive_ts_ns = row.optional_integer(6);
    r.latency_ns = row.optional_integer(7);
    const auto status = stack::parse_sample_status(row.text(8));
    if (!status) row.fail("unknown status '" + row.text(8) + "'");
    r.status = *status;
    const bool lost = r.status == stack::SampleStatus::kLost;
    if (lost == (r.receive_ts_ns.has_value() || r.latency_ns.has_value()) ||
        r.receive_ts_ns.has_value() != r.latency_ns.has_value()) {
      row.fail("receive_ts_ns and latency_ns must be empty exactly for LOST samples");
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<stack::PublisherRecord> read_publishers(std::istream& in) {
  std::vector<stack::PublisherRecord> out;
  read_file(in, FileKind::kPublishers, [&](const Row& row) {
    stack::PublisherRecord r;
    r.run_id = row.text(0);
    r.topic_id = row.integer<std::uint16_t>(1);
    r.publisher_node = row.integer<std::uint16_t>(2);
    r.seq = row.integer<std::uint32_t>(3);
    r.scheduled_ns = row.integer<std::int64_t>(4);
    r.publish_ts_ns = row.optional_integer(5);
    const auto status = stack::parse_send_status(row.text(6));
    if (!status) row.fail("unknown send status '" + row.text(6) + "'");
    r.send_status = *status;
    if ((r.send_status == stack::SendStatus::kUnsent) == r.publish_ts_ns.has_value()) {
      row.fail("publish_ts_ns must be empty exactly for UNSENT records");
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<stack::TraceEvent> read_traces(std::istream& in) {
  std::vector<stack::TraceEvent> out;
  read_file(in, FileKind::kTraces, [&](const Row& row) {
    stack::TraceEvent r;
    r.run_id = row.text(0);
    r.node_id = row.integer<std::uint16_t>(1);
    r.topic_id = row.integer<std::uint16_t>(2);
    r.seq = row.integer<std::uint32_t>(3);
    const auto stage = stack::parse_stage(row.text(4));
    if (!stage) row.fail("unknown stage '" + row.text(4) + "'");
    r.stage = *stage;
    r.ts_ns = row.integer<std::int64_t>(5);
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<ReportRow> read_report(std::istream& in) {
  std::vector<ReportRow> out;
  read_file(in, FileKind::kReport,
            [&](const Row& row) { out.push_back(ReportRow{row.text(0), row.text(1), row.text(2), row.text(3)}); });
  return out;
}

std::vector<IndexRow> read_index(std::istream& in) {
  std::vector<IndexRow> out;
  read_file(in, FileKind::kIndex,
            [&](const Row& row) { out.push_back(IndexRow{row.text(0), row.text(1), row.text(2), row.text(3)}); });
  return out;
}

void emit_samples(const std::filesystem::path& path, std::span<const stack::SampleRecord> records) {
  emit(path, [&](std::ostream& out) { write_samples(out, records); });
}
void emit_publishers(const std::filesystem::path& path, std::span<const stack::PublisherRecord> records) {
  emit(path, [&](std::ostream& out) { write_publishers(out, records); });
}
void emit_traces(const std::filesystem::path& path, std::span<const stack::TraceEvent> records) {
  emit(path, [&](std::ostream& out) { write_traces(out, records); });
}
void emit_report(const std::filesystem::path& path, std::span<const ReportRow> rows) {
  emit(path, [&](std::ostream& out) { write_report(out, rows); });
}
void emit_index(const std::filesystem::path& path, std::span<const IndexRow> rows) {
  emit(path, [&](std::ostream& out) { write_index(out, rows); });
}

std::vector<stack::SampleRecord> load_samples(const std::filesystem::path& path) {
  return load(path, [](std::istream& in) { return read_samples(in); });
}
std::vector<stack::PublisherRecord> load_publishers(const std::filesystem::path& path) {
  return load(path, [](std::istream& in) { return read_publishers(in); });
}
std::vector<stack::TraceEvent> load_traces(const std::filesystem::path& path) {
  return load(path, [](std::istream& in) { return read_traces(in); });
}
std::vector<ReportRow> load_report(const std::filesystem::path& path) {
  return load(path, [](std::istream& in) { return read_report(in); });
}
std::vector<IndexRow> load_index(const std::filesystem::path& path) {
  return load(path, [](std::istream& in) { return read_index(in); });
}

}  // namespace pubbench::report
