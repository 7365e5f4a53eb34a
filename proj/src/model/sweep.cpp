#include "pubbench/model/sweep.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace pubbench::model {

namespace {

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = text.find(',');
    auto item = text.substr(0, comma);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

template <typename T>
std::vector<T> dedupe(const std::vector<T>& values) {
  std::vector<T> out;
  for (const auto& v : values) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

template <typename T>
std::vector<T> parse_uint_list(std::string_view key, std::string_view text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc{} || ptr != item.data() + item.size() || value > std::numeric_limits<T>::max()) {
      throw ConfigError(std::string(key) + ": bad list value '" + item + "'");
    }
    out.push_back(static_cast<T>(value));
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

SweepMatrix SweepMatrix::parse(std::string_view text) {
  const auto doc = ConfigDocument::parse(text);
  SweepMatrix m;
  for (const auto& e : doc.entries()) {
    if (e.key == "node_count") {
      m.node_counts = parse_uint_list<std::uint32_t>(e.key, e.value);
    } else if (e.key == "topology_kind") {
      for (const auto& item : split_list(e.value)) m.topology_kinds.push_back(parse_topology_kind(item));
    } else if (e.key == "payload_bytes") {
      m.payload_bytes = parse_uint_list<std::uint64_t>(e.key, e.value);
    } else if (e.key == "frequency_hz") {
      m.frequencies_hz = parse_uint_list<std::uint32_t>(e.key, e.value);
    } else {
      if (e.value.find(',') != std::string::npos) {
        throw ConfigError("line " + std::to_string(e.line) + ": key '" + e.key + "' does not accept a list");
      }
      const auto& keys = config_keys();
      if (std::find(keys.begin(), keys.end(), e.key) == keys.end()) {
        throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");
      }
      m.fixed.set(e.key, e.value);
    }
  }
  return m;
}

SweepMatrix SweepMatrix::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file '" + path + "': file not found or unreadable");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::vector<BenchmarkConfig> expand_sweep(const SweepMatrix& matrix) {
  if (matrix.node_counts.empty()) throw ConfigError("sweep dimension node_count is empty");
  if (matrix.topology_kinds.empty()) throw ConfigError("sweep dimension topology_kind is empty");
  if (matrix.payload_bytes.empty()) throw ConfigError("sweep dimension payload_bytes is empty");
  if (matrix.frequencies_hz.empty()) throw ConfigError("sweep dimension frequency_hz is empty");

  for (const char* key : {"node_count", "topology_kind", "payload_bytes", "frequency_hz"}) {
    if (matrix.fixed.find(key) != nullptr) {
      throw ConfigError(std::string("sweep key '") + key + "' belongs to the matrix dimensions");
    }
  }

  std::string prefix;
  ConfigDocument fixed = matrix.fixed;
  if (const auto* id = fixed.find("run_id")) {
    prefix = id->value + "-";
    fixed.erase("run_id");
  }

  const auto kinds = dedupe(matrix.topology_kinds);
  std::vector<BenchmarkConfig> out;
  std::set<std::string> seen_ids;
  for (const auto nodes : dedupe(matrix.node_counts)) {
    for (const auto kind : kinds) {
      if (nodes == 2 && kind != kinds.front()) continue;
      if (kind == TopologyKind::kPaired && nodes % 2 != 0) continue;
      for (const auto size : dedupe(matrix.payload_bytes)) {
        for (const auto freq : dedupe(matrix.frequencies_hz)) {
          ConfigDocument doc = fixed;
          doc.set("node_count", std::to_string(nodes));
          doc.set("topology_kind", std::string(to_string(kind)));
          doc.set("payload_bytes", std::to_string(size));
          doc.set("frequency_hz", std::to_string(freq));
          auto cfg = validate_config(doc);
          cfg.run_id = prefix + default_run_id(cfg);
          check_config(cfg);
          if (!seen_ids.insert(cfg.run_id).second) continue;
          out.push_back(std::move(cfg));
        }
      }
    }
  }
  return out;
}

SweepMatrix table1_matrix() {
  SweepMatrix m;
  m.node_counts = {2, 32};
  m.topology_kinds = {TopologyKind::kOneToMany};
  m.payload_bytes = {16, 64ULL << 10U, 1ULL << 20U};
  m.frequencies_hz = {10};
  m.fixed.set("run_id", "table1");
  m.fixed.set("duration_s", "60");
  m.fixed.set("backend", "UDP");
  m.fixed.set("reliability", "RELIABLE");
  return m;
}

SweepMatrix table2_matrix() {
  SweepMatrix m;
  m.node_counts = {2, 8, 32, 64};
  m.topology_kinds = {TopologyKind::kPaired, TopologyKind::kOneToMany, TopologyKind::kManyToOne};
  m.payload_bytes = {0, 64ULL << 10U, 512ULL << 10U, 1ULL << 20U, 2ULL << 20U};
  m.frequencies_hz = {10, 100};
  m.fixed.set("run_id", "table2");
  m.fixed.set("duration_s", "60");
  m.fixed.set("backend", "UDP");
  m.fixed.set("reliability", "RELIABLE");
  return m;
}

SweepMatrix preset_matrix(std::string_view name) {
  const auto key = lower(name);
  if (key == "table1") return table1_matrix();
  if (key == "table2") return table2_matrix();
  throw ConfigError("unknown preset '" + std::string(name) + "' (expected table1 or table2)");
}

}  // namespace pubbench::model
