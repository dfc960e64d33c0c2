#ifndef SWARMSIM_SIMULATOR_H
#define SWARMSIM_SIMULATOR_H

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmsim/sim_time.h"

namespace swarmsim {

enum class EventKind : std::uint8_t {
  kPacketDeparture,
  kPacketArrival,
  kAckArrival,
  kTimerExpiry,
  kRechokeTick,
  kOptimisticUnchokeTick,
  kTrackerAnnounce,
  kMetricsSample,
};
inline constexpr std::size_t kEventKindCount = 8;

const char* EventKindName(EventKind kind);

// Raised when a caller breaks an API precondition (e.g. scheduling in the
// past). These are programming errors, never modeled outcomes.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Raised by RunUntil when no live event remains but the stop condition is
// still false.
class DeadlockError : public std::runtime_error {
 public:
  DeadlockError(SimTime at, const std::string& what)
      : std::runtime_error(what), at_(at) {}
  SimTime at() const { return at_; }

 private:
  SimTime at_;
};

class EventHandle {
 public:
  EventHandle() = default;
  explicit EventHandle(std::uint64_t sequence) : sequence_(sequence) {}
  std::uint64_t sequence() const { return sequence_; }
  bool valid() const { return sequence_ != 0; }

 private:
  std::uint64_t sequence_ = 0;
};

// Single-threaded discrete-event engine.
//
// Events fire in (fire_time, sequence) order; sequence is assigned at
// schedule time so ties resolve in insertion order. Events flagged as
// housekeeping (periodic ticks) do not keep a run alive: RunUntil reports a
// deadlock once only housekeeping events remain.
class Simulator {
 public:
  using Callback = std::function<void()>;

  struct Stats {
    std::uint64_t scheduled = 0;
    std::uint64_t dispatched = 0;
    std::uint64_t cancelled = 0;
    std::array<std::uint64_t, kEventKindCount> dispatched_by_kind{};
  };

  Simulator() = default;
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  SimTime Now() const { return now_; }

  EventHandle Schedule(SimTime fire_time, EventKind kind, Callback callback,
                       bool housekeeping = false);
  EventHandle ScheduleIn(SimTime delay, EventKind kind, Callback callback,
                         bool housekeeping = false) {
    return Schedule(now_ + delay, kind, std::move(callback), housekeeping);
  }

  // Returns false if the event already fired, was already cancelled, or the
  // handle is unknown. Linear in the number of pending events; intended for
  // rare use (periodic timers reschedule lazily instead).
  bool Cancel(EventHandle handle);

  // Dispatches the next pending event. Returns false when nothing is pending.
  bool Step();

  // Dispatches events until |done| holds. Throws DeadlockError if the live
  // event set drains first.
  SimTime RunUntil(const std::function<bool()>& done);

  // Dispatches every event with fire_time <= |end| and advances the clock to
  // |end|.
  void RunUntilTime(SimTime end);

  std::size_t pending() const { return heap_.size() - cancelled_pending_; }
  std::size_t live_pending() const { return live_pending_; }
  const Stats& stats() const { return stats_; }

 private:
  struct Entry {
    SimTime fire_time;
    std::uint64_t sequence;
    EventKind kind;
    bool housekeeping;
    bool cancelled;
    Callback callback;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
      return a.sequence > b.sequence;
    }
  };

  Entry PopNext();

  SimTime now_ = kZeroTime;
  std::uint64_t next_sequence_ = 1;
  std::vector<Entry> heap_;
  std::size_t cancelled_pending_ = 0;
  std::size_t live_pending_ = 0;
  Stats stats_;
};

}  // namespace swarmsim

#endif  // SWARMSIM_SIMULATOR_H
