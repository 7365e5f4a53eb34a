#include "pubbench/stack/executor.hpp"

#include <stdexcept>

namespace pubbench::stack {

TimerId Executor::add_timer(std::int64_t first_deadline_ns, std::int64_t period_ns, TimerCallback callback,
                            std::optional<std::uint64_t> max_ticks) {
  if (period_ns <= 0) throw std::invalid_argument("timer period must be positive");
  timers_.push_back(Timer{first_deadline_ns, period_ns, 0, max_ticks, std::move(callback),
                          !max_ticks || *max_ticks > 0});
  return timers_.size() - 1;
}

void Executor::cancel_timer(TimerId id) { timers_.at(id).active = false; }

std::optional<std::size_t> Executor::earliest_timer() const {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < timers_.size(); ++i) {
    if (!timers_[i].active) continue;
    if (!best || timers_[i].next_deadline_ns < timers_[*best].next_deadline_ns) best = i;
  }
  return best;
}

bool Executor::spin_once() {
  if (source_ != nullptr) source_->poll(clock_.now_ns());

  if (const auto idx = earliest_timer(); idx && timers_[*idx].next_deadline_ns <= clock_.now_ns()) {
    Timer& t = timers_[*idx];
    const TimerTick tick{t.next_index, t.next_deadline_ns};
    ++t.next_index;
    t.next_deadline_ns += t.period_ns;
    if (t.remaining && --*t.remaining == 0) t.active = false;
    // Copy: the callback may add timers and reallocate the vector.
    auto callback = t.callback;
    callback(tick);
    ++processed_;
    return true;
  }
  if (source_ != nullptr && source_->dispatch_one()) {
    ++processed_;
    return true;
  }
  return false;
}

std::optional<std::int64_t> Executor::next_action_ns() const {
  std::optional<std::int64_t> next;
  if (const auto idx = earliest_timer()) next = timers_[*idx].next_deadline_ns;
  if (source_ != nullptr) {
    if (const auto in = source_->next_input_ns(); in && (!next || *in < *next)) next = in;
  }
  return next;
}

std::size_t Executor::spin(std::int64_t until_ns) {
  std::size_t count = 0;
  while (clock_.now_ns() < until_ns) {
    if (spin_once()) {
      ++count;
      continue;
    }
    auto target = until_ns;
    if (const auto next = next_action_ns(); next && *next < target) target = *next;
    const auto now = clock_.now_ns();
    if (target <= now) {
      // Known input is due but produced no callback yet (e.g. a partial
      // message); poll again after the minimal step.
      if (clock_.is_virtual()) clock_.advance_to(now + 1);
      continue;
    }
    if (source_ != nullptr) source_->wait(target);
    clock_.advance_to(target);
  }
  return count;
}

}  // namespace pubbench::stack
