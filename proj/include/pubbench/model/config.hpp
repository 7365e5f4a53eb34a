#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pubbench::model {

enum class TopologyKind { kPaired, kOneToMany, kManyToOne };
enum class Backend { kSim, kUdp };
enum class Reliability { kBestEffort, kReliable };

std::string_view to_string(TopologyKind kind);
std::string_view to_string(Backend backend);
std::string_view to_string(Reliability reliability);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

TopologyKind parse_topology_kind(std::string_view text);
Backend parse_backend(std::string_view text);
Reliability parse_reliability(std::string_view text);

/// Work-cost model for the simulated backend. Every stage of the stack
/// advances the node's virtual clock by these amounts; the real backend
/// ignores them and measures actual elapsed time instead.
struct SimCostModel {
  std::uint64_t stage_ns = 2000;
  std::uint64_t serialize_ps_per_byte = 1000;
  std::uint64_t send_ps_per_byte = 100;
  std::uint64_t datagram_ns = 2000;
  std::uint64_t callback_ns = 1000;

  bool operator==(const SimCostModel&) const = default;
};

inline constexpr std::uint32_t kDefaultFragmentPayloadBytes = 65000;
inline constexpr std::uint32_t kMaxUdpFragmentPayloadBytes = 65000;
inline constexpr std::uint32_t kMaxSimFragmentPayloadBytes = 65536;

/// One fully resolved benchmark run.
struct BenchmarkConfig {
  std::string run_id;
  std::uint32_t node_count = 2;
  TopologyKind topology_kind = TopologyKind::kPaired;
  std::uint64_t payload_bytes = 0;
  std::uint32_t frequency_hz = 10;
  double duration_s = 60.0;
  Backend backend = Backend::kSim;
  Reliability reliability = Reliability::kReliable;
  std::uint32_t fragment_payload_bytes = kDefaultFragmentPayloadBytes;
  std::uint64_t seed = 1;
  std::uint32_t discovery_wait_ms = 1000;
  std::uint32_t drain_ms = 500;
  double loss_prob = 0.0;
  std::uint64_t sim_delay_ns = 0;
  std::uint32_t max_repair_rounds = 10;
  std::uint32_t repair_interval_ms = 5;
  std::uint64_t phase_offset_ns = 0;
  std::uint32_t base_port = 0;
  std::uint32_t socket_buffer_bytes = 4U << 20U;
  SimCostModel sim_cost{};

  std::int64_t period_ns() const;
  std::int64_t duration_ns() const;

  bool operator==(const BenchmarkConfig&) const = default;
};

/// floor(frequency_hz * duration_s), evaluated on the nanosecond grid.
std::uint64_t expected_message_count(const BenchmarkConfig& config);

/// Ordered `key = value` document. Keys keep their source line for diagnostics.
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

class ConfigDocument {
 public:
  static ConfigDocument parse(std::string_view text);
  static ConfigDocument load(const std::string& path);

  void set(std::string key, std::string value);
  const ConfigEntry* find(std::string_view key) const;
  bool erase(std::string_view key);
  const std::vector<ConfigEntry>& entries() const { return entries_; }

 private:
  std::vector<ConfigEntry> entries_;
};

/// Names of every accepted configuration key, in canonical order.
const std::vector<std::string_view>& config_keys();

BenchmarkConfig validate_config(const ConfigDocument& document);
void check_config(const BenchmarkConfig& config);

/// Canonical text form; validate_config(parse(format_config(c))) == c.
std::string format_config(const BenchmarkConfig& config);

/// Run id used when the document does not name one.
std::string default_run_id(const BenchmarkConfig& config);

}  // namespace pubbench::model
