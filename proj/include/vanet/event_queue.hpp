#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "vanet/sim_time.hpp"

namespace vanet::engine {

enum class EventKind { mobility_step, app_send, mac_timer, aodv_timer, frame_start, frame_end, routing_send };

const char* to_string(EventKind k);

struct SchedulingError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Discrete-event queue. Events run in strict (time, sequence) order, so two
/// events at the same time execute in the order they were scheduled.
class EventQueue {
 public:
  using Handler = std::function<void()>;

  /// Throws SchedulingError if `at` lies before the current clock.
  std::uint64_t schedule(SimTime at, EventKind kind, Handler fn);
  /// Runs the earliest event. Returns false when the queue is empty.
  bool dispatch_next();
  /// Runs every event with time <= end, then parks the clock at `end`.
  void run_until(SimTime end);

  SimTime now() const { return now_; }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  SimTime next_time() const { return heap_.top().at; }
  std::uint64_t dispatched() const { return dispatched_; }

 private:
  struct Entry {
    SimTime at;
    std::uint64_t seq;
    EventKind kind;
    Handler fn;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  SimTime now_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatched_ = 0;
};

}  // namespace vanet::engine
