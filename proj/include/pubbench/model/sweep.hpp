#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pubbench/model/config.hpp"

namespace pubbench::model {

/// Parameter matrix. The four dimension lists are crossed; every other key
/// in `fixed` is shared by all expanded configurations.
struct SweepMatrix {
  std::vector<std::uint32_t> node_counts;
  std::vector<TopologyKind> topology_kinds;
  std::vector<std::uint64_t> payload_bytes;
  std::vector<std::uint32_t> frequencies_hz;
  ConfigDocument fixed;

  /// Matrix file: same keys as a config document, with comma-separated
  /// lists for node_count, topology_kind, payload_bytes and frequency_hz.
  static SweepMatrix parse(std::string_view text);
  static SweepMatrix load(const std::string& path);
};

/// Cartesian product in (node_count, topology, size, frequency) order.
/// node_count = 2 keeps only the first listed topology kind (all shapes are
/// 1-1 there), PAIRED is skipped for odd node counts and duplicate list
/// values are dropped. A `run_id` in `fixed` becomes a prefix.
std::vector<BenchmarkConfig> expand_sweep(const SweepMatrix& matrix);

/// Comparative benchmark matrix: 2 and 32 nodes, 1-N, Struct16 / Array64k /
/// PointCloud1m, 10 Hz, 60 s.
SweepMatrix table1_matrix();

/// Detailed benchmark matrix: 2/8/32/64 nodes, all three shapes,
/// 0 B..2 MiB, 10 and 100 Hz, 60 s.
SweepMatrix table2_matrix();

SweepMatrix preset_matrix(std::string_view name);

}  // namespace pubbench::model
