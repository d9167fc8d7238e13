#pragma once

#include <cstdint>
#include <queue>
#include <vector>

#include "manet/types.hpp"

namespace manet::sim {

template <typename Payload>
struct Event {
  double time{0.0};
  std::uint64_t ordinal{0};
  Payload payload;
};

/// Min-queue on (time, ordinal). The ordinal is the insertion counter, so
/// simultaneous events run in the order they were scheduled.
template <typename Payload>
class EventQueue {
 public:
  void push(double time, Payload payload) {
    if (time < now_) {
      throw RuntimeInvariantError("event scheduled before the current time");
    }
    heap_.push(Event<Payload>{time, next_ordinal_++, std::move(payload)});
  }

  Event<Payload> pop() {
    Event<Payload> e = heap_.top();
    heap_.pop();
    if (e.time < now_) {
      throw RuntimeInvariantError("event queue popped out of order");
    }
    now_ = e.time;
    return e;
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  double now() const { return now_; }
  const Event<Payload>& top() const { return heap_.top(); }

 private:
  struct Later {
    bool operator()(const Event<Payload>& a, const Event<Payload>& b) const {
      return a.time != b.time ? a.time > b.time : a.ordinal > b.ordinal;
    }
  };

  std::priority_queue<Event<Payload>, std::vector<Event<Payload>>, Later> heap_;
  std::uint64_t next_ordinal_{0};
  double now_{0.0};
};

}  // namespace manet::sim
