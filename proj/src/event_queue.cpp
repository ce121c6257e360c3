#include "vanet/event_queue.hpp"

#include <string>

namespace vanet::engine {

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::mobility_step: return "mobility_step";
    case EventKind::app_send: return "app_send";
    case EventKind::mac_timer: return "mac_timer";
    case EventKind::aodv_timer: return "aodv_timer";
    case EventKind::frame_start: return "frame_start";
    case EventKind::frame_end: return "frame_end";
    case EventKind::routing_send: return "routing_send";
  }
  return "?";
}

std::uint64_t EventQueue::schedule(SimTime at, EventKind kind, Handler fn) {
  if (at < now_) {
    throw SchedulingError(std::string(to_string(kind)) + " event scheduled in the past (" +
                          std::to_string(at.ns()) + " ns < " + std::to_string(now_.ns()) + " ns)");
  }
  const std::uint64_t seq = next_seq_++;
  heap_.push(Entry{at, seq, kind, std::move(fn)});
  return seq;
}

bool EventQueue::dispatch_next() {
  if (heap_.empty()) return false;
  Entry e = std::move(const_cast<Entry&>(heap_.top()));
  heap_.pop();
  now_ = e.at;
  ++dispatched_;
  e.fn();
  return true;
}

void EventQueue::run_until(SimTime end) {
  while (!heap_.empty() && heap_.top().at <= end) dispatch_next();
  if (now_ < end) now_ = end;
}

}  // namespace vanet::engine
