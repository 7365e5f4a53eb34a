#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>

namespace pubbench {

/// Nanosecond time source for one node.
///
/// `spend` models work the caller is about to account for and `advance_to`
/// models idling. The monotonic clock ignores both because real work and real
/// waiting already move it; the virtual clock is driven by them alone.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ns() const = 0;
  virtual void spend(std::int64_t ns) = 0;
  virtual void advance_to(std::int64_t ns) = 0;
  virtual bool is_virtual() const = 0;
};

class MonotonicClock final : public Clock {
 public:
  std::int64_t now_ns() const override { return read(); }
  void spend(std::int64_t) override {}
  void advance_to(std::int64_t) override {}
  bool is_virtual() const override { return false; }

  static std::int64_t read() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
  }
};

class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(std::int64_t start_ns = 0) : now_(start_ns) {}

  std::int64_t now_ns() const override { return now_; }
  void spend(std::int64_t ns) override { now_ += std::max<std::int64_t>(ns, 0); }
  void advance_to(std::int64_t ns) override { now_ = std::max(now_, ns); }
  bool is_virtual() const override { return true; }

 private:
  std::int64_t now_;
};

}  // namespace pubbench
