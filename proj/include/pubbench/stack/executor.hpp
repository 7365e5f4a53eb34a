#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pubbench/model/clock.hpp"

namespace pubbench::stack {

struct TimerTick {
  std::uint64_t index = 0;
  std::int64_t deadline_ns = 0;
};

using TimerCallback = std::function<void(const TimerTick&)>;
using TimerId = std::size_t;

/// Input side of a node: transport events that turn into callbacks.
class EventSource {
 public:
  virtual ~EventSource() = default;

  /// Absorbs input that is available at now_ns (reassembly, repair, NACKs).
  virtual void poll(std::int64_t now_ns) = 0;

  /// Runs one ready delivery callback. Returns false when none is ready.
  virtual bool dispatch_one() = 0;

  /// Earliest time poll/dispatch will have work, when known in advance.
  virtual std::optional<std::int64_t> next_input_ns() const = 0;

  /// Blocks until input may be available or the deadline passes.
  virtual void wait(std::int64_t deadline_ns) = 0;
};

/// Single-threaded dispatcher. Each iteration runs the earliest due timer
/// tick if there is one, otherwise one ready delivery callback. Callbacks
/// never overlap. A periodic timer keeps its deadline grid: ticks that fell
/// due while another callback ran execute afterwards, in deadline order,
/// none skipped.
class Executor {
 public:
  explicit Executor(Clock& clock, EventSource* source = nullptr) : clock_(clock), source_(source) {}

  /// `max_ticks` bounds the number of executions; unset means unbounded.
  TimerId add_timer(std::int64_t first_deadline_ns, std::int64_t period_ns, TimerCallback callback,
                    std::optional<std::uint64_t> max_ticks = std::nullopt);
  void cancel_timer(TimerId id);

  /// One iteration at the current time. True if a callback ran.
  bool spin_once();

  /// Iterates until the clock reaches until_ns. Returns callbacks executed.
  std::size_t spin(std::int64_t until_ns);

  /// Earliest time at which spin_once may have something to do.
  std::optional<std::int64_t> next_action_ns() const;

  std::size_t processed() const { return processed_; }
  Clock& clock() { return clock_; }

 private:
  struct Timer {
    std::int64_t next_deadline_ns;
    std::int64_t period_ns;
    std::uint64_t next_index = 0;
    std::optional<std::uint64_t> remaining;
    TimerCallback callback;
    bool active = true;
  };

  std::optional<std::size_t> earliest_timer() const;

  Clock& clock_;
  EventSource* source_;
  std::vector<Timer> timers_;
  std::size_t processed_ = 0;
};

}  // namespace pubbench::stack
