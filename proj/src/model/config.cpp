#include "pubbench/model/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace pubbench::model {

namespace {

std::string normalize_token(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    out.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_unsigned(std::string_view key, std::string_view text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" +
                      std::string(text) + "'");
  }
  if (value > std::numeric_limits<T>::max()) {
    throw ConfigError(std::string(key) + ": value " + std::string(text) + " out of range");
  }
  return static_cast<T>(value);
}

double parse_number(std::string_view key, std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty() || !std::isfinite(value)) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

struct Field {
  std::string_view key;
  bool required;
  void (*parse)(BenchmarkConfig&, std::string_view key, std::string_view value);
  std::string (*format)(const BenchmarkConfig&);
};

#define PB_UINT_FIELD(name, member, type, required)                                     \
  Field {                                                                               \
    name, required,                                                                     \
        [](BenchmarkConfig& c, std::string_view k, std::string_view v) {                \
          c.member = parse_unsigned<type>(k, v);                                        \
        },                                                                              \
        [](const BenchmarkConfig& c) { return std::to_string(c.member); }               \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"run_id", false,
            [](BenchmarkConfig& c, std::string_view, std::string_view v) { c.run_id = std::string(v); },
            [](const BenchmarkConfig& c) { return c.run_id; }},
      PB_UINT_FIELD("node_count", node_count, std::uint32_t, true),
      Field{"topology_kind", true,
            [](BenchmarkConfig& c, std::string_view, std::string_view v) {
              c.topology_kind = parse_topology_kind(v);
            },
            [](const BenchmarkConfig& c) { return std::string(to_string(c.topology_kind)); }},
      PB_UINT_FIELD("payload_bytes", payload_bytes, std::uint64_t, true),
      PB_UINT_FIELD("frequency_hz", frequency_hz, std::uint32_t, true),
      Field{"duration_s", true,
            [](BenchmarkConfig& c, std::string_view k, std::string_view v) {
              c.duration_s = parse_number(k, v);
            },
            [](const BenchmarkConfig& c) { return format_number(c.duration_s); }},
      Field{"backend", false,
            [](BenchmarkConfig& c, std::string_view, std::string_view v) { c.backend = parse_backend(v); },
            [](const BenchmarkConfig& c) { return std::string(to_string(c.backend)); }},
      Field{"reliability", false,
            [](BenchmarkConfig& c, std::string_view, std::string_view v) {
              c.reliability = parse_reliability(v);
            },
            [](const BenchmarkConfig& c) { return std::string(to_string(c.reliability)); }},
      PB_UINT_FIELD("fragment_payload_bytes", fragment_payload_bytes, std::uint32_t, false),
      PB_UINT_FIELD("seed", seed, std::uint64_t, false),
      PB_UINT_FIELD("discovery_wait_ms", discovery_wait_ms, std::uint32_t, false),
      PB_UINT_FIELD("drain_ms", drain_ms, std::uint32_t, false),
      Field{"loss_prob", false,
            [](BenchmarkConfig& c, std::string_view k, std::string_view v) {
              c.loss_prob = parse_number(k, v);
            },
            [](const BenchmarkConfig& c) { return format_number(c.loss_prob); }},
      PB_UINT_FIELD("sim_delay_ns", sim_delay_ns, std::uint64_t, false),
      PB_UINT_FIELD("max_repair_rounds", max_repair_rounds, std::uint32_t, false),
      PB_UINT_FIELD("repair_interval_ms", repair_interval_ms, std::uint32_t, false),
      PB_UINT_FIELD("phase_offset_ns", phase_offset_ns, std::uint64_t, false),
      PB_UINT_FIELD("base_port", base_port, std::uint32_t, false),
      PB_UINT_FIELD("socket_buffer_bytes", socket_buffer_bytes, std::uint32_t, false),
      PB_UINT_FIELD("sim_stage_ns", sim_cost.stage_ns, std::uint64_t, false),
      PB_UINT_FIELD("sim_serialize_ps_per_byte", sim_cost.serialize_ps_per_byte, std::uint64_t, false),
      PB_UINT_FIELD("sim_send_ps_per_byte", sim_cost.send_ps_per_byte, std::uint64_t, false),
      PB_UINT_FIELD("sim_datagram_ns", sim_cost.datagram_ns, std::uint64_t, false),
      PB_UINT_FIELD("sim_callback_ns", sim_cost.callback_ns, std::uint64_t, false),
  };
  return table;
}

#undef PB_UINT_FIELD

bool is_safe_run_id(std::string_view id) {
  if (id.empty() || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

}  // namespace

std::string_view to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::kPaired: return "PAIRED";
    case TopologyKind::kOneToMany: return "ONE_TO_MANY";
    case TopologyKind::kManyToOne: return "MANY_TO_ONE";
  }
  return "?";
}

std::string_view to_string(Backend backend) {
  return backend == Backend::kSim ? "SIM" : "UDP";
}

std::string_view to_string(Reliability reliability) {
  return reliability == Reliability::kBestEffort ? "BEST_EFFORT" : "RELIABLE";
}

TopologyKind parse_topology_kind(std::string_view text) {
  const auto token = normalize_token(text);
  if (token == "PAIRED") return TopologyKind::kPaired;
  if (token == "ONE_TO_MANY") return TopologyKind::kOneToMany;
  if (token == "MANY_TO_ONE") return TopologyKind::kManyToOne;
  throw ConfigError("topology_kind: unknown value '" + std::string(text) + "'");
}

Backend parse_backend(std::string_view text) {
  const auto token = normalize_token(text);
  if (token == "SIM") return Backend::kSim;
  if (token == "UDP") return Backend::kUdp;
  throw ConfigError("backend: unknown value '" + std::string(text) + "'");
}

Reliability parse_reliability(std::string_view text) {
  const auto token = normalize_token(text);
  if (token == "BEST_EFFORT") return Reliability::kBestEffort;
  if (token == "RELIABLE") return Reliability::kReliable;
  throw ConfigError("reliability: unknown value '" + std::string(text) + "'");
}

std::int64_t BenchmarkConfig::period_ns() const {
  return static_cast<std::int64_t>(1'000'000'000ULL / frequency_hz);
}

std::int64_t BenchmarkConfig::duration_ns() const {
  return static_cast<std::int64_t>(std::llround(duration_s * 1e9));
}

std::uint64_t expected_message_count(const BenchmarkConfig& config) {
  __extension__ using u128 = unsigned __int128;
  const auto duration = static_cast<u128>(config.duration_ns());
  return static_cast<std::uint64_t>(duration * config.frequency_hz / 1'000'000'000U);
}

ConfigDocument ConfigDocument::parse(std::string_view text) {
  ConfigDocument doc;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (doc.find(key) != nullptr) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
    }
    doc.entries_.push_back({std::string(key), std::string(value), line_no});
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "': file not found or unreadable");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void ConfigDocument::set(std::string key, std::string value) {
  for (auto& e : entries_) {
    if (e.key == key) {
      e.value = std::move(value);
      return;
    }
  }
  entries_.push_back({std::move(key), std::move(value), 0});
}

const ConfigEntry* ConfigDocument::find(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

bool ConfigDocument::erase(std::string_view key) {
  const auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.key == key; });
  if (it == entries_.end()) return false;
  entries_.erase(it);
  return true;
}

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys = [] {
    std::vector<std::string_view> out;
    for (const auto& f : fields()) out.push_back(f.key);
    return out;
  }();
  return keys;
}

BenchmarkConfig validate_config(const ConfigDocument& document) {
  for (const auto& entry : document.entries()) {
    const bool known = std::any_of(fields().begin(), fields().end(),
                                   [&](const Field& f) { return f.key == entry.key; });
    if (!known) {
      std::string where = entry.line > 0 ? "line " + std::to_string(entry.line) + ": " : "";
      throw ConfigError(where + "unknown key '" + entry.key + "'");
    }
  }
  BenchmarkConfig config;
  for (const auto& field : fields()) {
    const auto* entry = document.find(field.key);
    if (entry == nullptr) {
      if (field.required) throw ConfigError("missing required key '" + std::string(field.key) + "'");
      continue;
    }
    field.parse(config, field.key, entry->value);
  }
  if (config.run_id.empty()) config.run_id = default_run_id(config);
  check_config(config);
  return config;
}

void check_config(const BenchmarkConfig& c) {
  if (!is_safe_run_id(c.run_id)) {
    throw ConfigError("run_id '" + c.run_id + "' must be non-empty and use only [A-Za-z0-9._-]");
  }
  if (c.node_count < 2) throw ConfigError("node_count must be at least 2");
  if (c.node_count > 65535) throw ConfigError("node_count must fit a 16-bit node id");
  if (c.topology_kind == TopologyKind::kPaired && c.node_count % 2 != 0) {
    throw ConfigError("PAIRED requires even node_count");
  }
  if (c.frequency_hz == 0 || c.frequency_hz > 1'000'000'000U) {
    throw ConfigError("frequency_hz must be in [1, 1e9]");
  }
  if (!(c.duration_s > 0.0) || c.duration_ns() <= 0) throw ConfigError("duration_s must be positive");
  if (c.fragment_payload_bytes == 0) throw ConfigError("fragment_payload_bytes must be positive");
  if (c.backend == Backend::kUdp && c.fragment_payload_bytes > kMaxUdpFragmentPayloadBytes) {
    throw ConfigError("fragment_payload_bytes must be at most 65000 on the UDP backend");
  }
  if (c.fragment_payload_bytes > kMaxSimFragmentPayloadBytes) {
    throw ConfigError("fragment_payload_bytes must be at most 65536");
  }
  const std::uint64_t fragments =
      c.payload_bytes == 0 ? 1 : (c.payload_bytes + c.fragment_payload_bytes - 1) / c.fragment_payload_bytes;
  if (fragments > 65535) throw ConfigError("payload needs more than 65535 fragments");
  if (!(c.loss_prob >= 0.0 && c.loss_prob <= 1.0)) throw ConfigError("loss_prob must be in [0, 1]");
  if (c.backend == Backend::kUdp && c.loss_prob != 0.0) throw ConfigError("loss injection is SIM-only");
  if (c.backend == Backend::kUdp && c.sim_delay_ns != 0) throw ConfigError("sim_delay_ns is SIM-only");
  if (c.max_repair_rounds == 0) throw ConfigError("max_repair_rounds must be positive");
  if (c.repair_interval_ms == 0) throw ConfigError("repair_interval_ms must be positive");
  if (c.base_port > 65535 || (c.base_port != 0 && c.base_port + c.node_count - 1 > 65535)) {
    throw ConfigError("base_port range exceeds 65535");
  }
  if (c.socket_buffer_bytes == 0) throw ConfigError("socket_buffer_bytes must be positive");
}

std::string format_config(const BenchmarkConfig& config) {
  std::string out;
  for (const auto& field : fields()) {
    out += field.key;
    out += " = ";
    out += field.format(config);
    out += '\n';
  }
  return out;
}

std::string default_run_id(const BenchmarkConfig& c) {
  std::string kind(to_string(c.topology_kind));
  std::transform(kind.begin(), kind.end(), kind.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return "n" + std::to_string(c.node_count) + "-" + kind + "-" + std::to_string(c.payload_bytes) + "b-" +
         std::to_string(c.frequency_hz) + "hz";
}

}  // namespace pubbench::model
