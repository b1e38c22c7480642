#include "hidsense/bus.hpp"

#include <algorithm>

namespace hidsense::bus {

void SimClock::schedule_at(Micros t, Callback cb) {
  if (t < now_) {
    throw StateError("cannot schedule at " + std::to_string(t) + " us, clock is at " +
                     std::to_string(now_));
  }
  queue_.push_back(Event{t, next_seq_++, std::move(cb)});
  std::push_heap(queue_.begin(), queue_.end(), Later{});
}

bool SimClock::run_next() {
  if (queue_.empty()) return false;
  std::pop_heap(queue_.begin(), queue_.end(), Later{});
  Event ev = std::move(queue_.back());
  queue_.pop_back();
  now_ = ev.time;
  ++dispatched_;
  ev.cb();
  return true;
}

void SimClock::run_until(Micros t_end) {
  if (t_end < now_) {
    throw StateError("run_until(" + std::to_string(t_end) + ") is in the past");
  }
  while (!queue_.empty() && queue_.front().time <= t_end) run_next();
  now_ = t_end;
}

}  // namespace hidsense::bus
