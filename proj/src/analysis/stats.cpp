#include "pubbench/analysis/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pubbench::analysis {

namespace {

__extension__ using i128 = __int128;
__extension__ using u128 = unsigned __int128;

i128 floor_div(i128 a, i128 b) {
  const i128 q = a / b;
  return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

u128 isqrt(u128 v) {
  auto x = static_cast<u128>(std::sqrt(static_cast<long double>(v)));
  while (x * x > v) --x;
  while ((x + 1) * (x + 1) <= v) ++x;
  return x;
}

// Quantile k/4 of a sorted sample, half up.
std::int64_t quartile(const std::vector<std::int64_t>& sorted, std::size_t k) {
  const auto scaled = (sorted.size() - 1) * k;
  const auto lo = scaled / 4;
  const auto rem = static_cast<i128>(scaled % 4);
  if (rem == 0) return sorted[lo];
  const i128 num = 4 * static_cast<i128>(sorted[lo]) + rem * (static_cast<i128>(sorted[lo + 1]) - sorted[lo]);
  return static_cast<std::int64_t>(floor_div(num + 2, 4));
}

}  // namespace

std::int64_t rounded_mean(std::span<const std::int64_t> values) {
  if (values.empty()) throw AnalysisError("mean of an empty sample");
  i128 sum = 0;
  for (const auto v : values) sum += v;
  const i128 n = static_cast<i128>(values.size());
  const i128 r = sum >= 0 ? (2 * sum + n) / (2 * n) : -((-2 * sum + n) / (2 * n));
  return static_cast<std::int64_t>(r);
}

LatencyStats latency_stats(std::span<const std::int64_t> latencies) {
  if (latencies.empty()) throw AnalysisError("latency statistics need at least one sample");
  std::vector<std::int64_t> sorted(latencies.begin(), latencies.end());
  std::sort(sorted.begin(), sorted.end());

  LatencyStats s;
  s.count = sorted.size();
  s.min_ns = sorted.front();
  s.max_ns = sorted.back();
  s.q1_ns = quartile(sorted, 1);
  s.median_ns = quartile(sorted, 2);
  s.q3_ns = quartile(sorted, 3);
  s.mean_ns = rounded_mean(sorted);

  i128 sum = 0;
  i128 sum_sq = 0;
  for (const auto v : sorted) {
    sum += v;
    sum_sq += static_cast<i128>(v) * v;
  }
  const i128 n = static_cast<i128>(sorted.size());
  const auto spread = static_cast<u128>(n * sum_sq - sum * sum);
  s.stddev_ns = static_cast<std::int64_t>((isqrt(4 * spread) + static_cast<u128>(n)) / static_cast<u128>(2 * n));

  // Fences in half-nanoseconds: x >= q1 - 1.5 IQR  <=>  2x >= 2 q1 - 3 IQR.
  const i128 iqr = static_cast<i128>(s.q3_ns) - s.q1_ns;
  const i128 low_fence2 = 2 * static_cast<i128>(s.q1_ns) - 3 * iqr;
  const i128 high_fence2 = 2 * static_cast<i128>(s.q3_ns) + 3 * iqr;
  const auto low = std::find_if(sorted.begin(), sorted.end(), [&](std::int64_t v) { return 2 * static_cast<i128>(v) >= low_fence2; });
  const auto high = std::find_if(sorted.rbegin(), sorted.rend(), [&](std::int64_t v) { return 2 * static_cast<i128>(v) <= high_fence2; });
  s.whisker_low_ns = std::min(*low, s.q1_ns);
  s.whisker_high_ns = std::max(*high, s.q3_ns);
  return s;
}

}  // namespace pubbench::analysis
