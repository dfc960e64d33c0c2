#ifndef SWARMSIM_SIM_TIME_H
#define SWARMSIM_SIM_TIME_H

#include <chrono>
#include <cstdint>

namespace swarmsim {

// Virtual time, microseconds since the start of a run.
using SimTime = std::chrono::duration<std::int64_t, std::micro>;

using namespace std::chrono_literals;

inline constexpr SimTime kZeroTime{0};

inline constexpr double ToSeconds(SimTime t) {
  return static_cast<double>(t.count()) / 1e6;
}

inline constexpr double ToMilliseconds(SimTime t) {
  return static_cast<double>(t.count()) / 1e3;
}

// Time needed to clock |bytes| onto a link of |capacity_bps|, rounded up to
// the next microsecond.
inline constexpr SimTime SerializationTime(std::int64_t bytes,
                                           std::int64_t capacity_bps) {
  const std::int64_t bits = bytes * 8;
  return SimTime{(bits * 1'000'000 + capacity_bps - 1) / capacity_bps};
}

}  // namespace swarmsim

#endif  // SWARMSIM_SIM_TIME_H
