#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

namespace pubbench::analysis {

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Distribution summary in integer nanoseconds.
///
/// Quartiles use linear interpolation between closest ranks on the sorted
/// sample (position (n-1)p), rounded half up. Whiskers are the most extreme
/// observations inside [q1 - 1.5 IQR, q3 + 1.5 IQR]; when no observation
/// lies between a fence and its quartile the whisker sits on the quartile.
/// Mean and population standard deviation are rounded to nearest.
struct LatencyStats {
  std::uint64_t count = 0;
  std::int64_t mean_ns = 0;
  std::int64_t stddev_ns = 0;
  std::int64_t min_ns = 0;
  std::int64_t q1_ns = 0;
  std::int64_t median_ns = 0;
  std::int64_t q3_ns = 0;
  std::int64_t whisker_low_ns = 0;
  std::int64_t whisker_high_ns = 0;
  std::int64_t max_ns = 0;

  bool operator==(const LatencyStats&) const = default;
};

/// Throws AnalysisError on empty input.
LatencyStats latency_stats(std::span<const std::int64_t> latencies);

/// Mean rounded to nearest, halves away from zero.
std::int64_t rounded_mean(std::span<const std::int64_t> values);

}  // namespace pubbench::analysis
