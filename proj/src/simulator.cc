#include "swarmsim/simulator.h"

#include <algorithm>
#include <string>

namespace swarmsim {

const char* EventKindName(EventKind kind) {
  switch (kind) {
    case EventKind::kPacketDeparture: return "PacketDeparture";
    case EventKind::kPacketArrival: return "PacketArrival";
    case EventKind::kAckArrival: return "AckArrival";
    case EventKind::kTimerExpiry: return "TimerExpiry";
    case EventKind::kRechokeTick: return "RechokeTick";
    case EventKind::kOptimisticUnchokeTick: return "OptimisticUnchokeTick";
    case EventKind::kTrackerAnnounce: return "TrackerAnnounce";
    case EventKind::kMetricsSample: return "MetricsSample";
  }
  return "?";
}

EventHandle Simulator::Schedule(SimTime fire_time, EventKind kind,
                                Callback callback, bool housekeeping) {
  if (fire_time < now_) {
    throw ContractViolation("event scheduled in the past: fire_time=" +
                            std::to_string(fire_time.count()) +
                            "us now=" + std::to_string(now_.count()) + "us");
  }
  const std::uint64_t sequence = next_sequence_++;
  heap_.push_back(Entry{fire_time, sequence, kind, housekeeping, false,
                        std::move(callback)});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
  ++stats_.scheduled;
  if (!housekeeping) ++live_pending_;
  return EventHandle{sequence};
}

bool Simulator::Cancel(EventHandle handle) {
  if (!handle.valid()) return false;
  for (Entry& e : heap_) {
    if (e.sequence != handle.sequence()) continue;
    if (e.cancelled) return false;
    e.cancelled = true;
    e.callback = nullptr;
    ++cancelled_pending_;
    ++stats_.cancelled;
    if (!e.housekeeping) --live_pending_;
    return true;
  }
  return false;
}

Simulator::Entry Simulator::PopNext() {
  std::pop_heap(heap_.begin(), heap_.end(), Later{});
  Entry e = std::move(heap_.back());
  heap_.pop_back();
  return e;
}

bool Simulator::Step() {
  while (!heap_.empty()) {
    Entry e = PopNext();
    if (e.cancelled) {
      --cancelled_pending_;
      continue;
    }
    now_ = e.fire_time;
    if (!e.housekeeping) --live_pending_;
    ++stats_.dispatched;
    ++stats_.dispatched_by_kind[static_cast<std::size_t>(e.kind)];
    e.callback();
    return true;
  }
  return false;
}

SimTime Simulator::RunUntil(const std::function<bool()>& done) {
  while (!done()) {
    if (live_pending_ == 0) {
      throw DeadlockError(now_, "no live events pending at t=" +
                                    std::to_string(now_.count()) +
                                    "us and stop condition unmet");
    }
    Step();
  }
  return now_;
}

void Simulator::RunUntilTime(SimTime end) {
  while (!heap_.empty()) {
    if (heap_.front().cancelled) {
      PopNext();
      --cancelled_pending_;
      continue;
    }
    if (heap_.front().fire_time > end) break;
    Step();
  }
  if (end > now_) now_ = end;
}

}  // namespace swarmsim
