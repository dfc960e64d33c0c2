#include "swarmsim/ledbat.h"

#include <algorithm>

namespace swarmsim {

LedbatState MakeLedbatState(std::int64_t mss, SimTime target, double gain,
                            int initial_window_segments) {
  LedbatState s;
  s.mss = mss;
  s.target = target;
  s.gain = gain;
  s.cwnd = static_cast<double>(initial_window_segments * mss);
  return s;
}

SimTime LedbatQueuingDelay(const LedbatState& state) {
  if (state.base_delay == SimTime::max()) return kZeroTime;
  return state.last_owd - state.base_delay;
}

LedbatState LedbatOnAck(LedbatState state, SimTime owd_sample,
                        std::int64_t bytes_acked) {
  state.base_delay = std::min(state.base_delay, owd_sample);
  state.last_owd = owd_sample;
  const double queuing =
      static_cast<double>((owd_sample - state.base_delay).count());
  const double off_target =
      1.0 - queuing / static_cast<double>(state.target.count());
  state.cwnd += state.gain * off_target * static_cast<double>(state.mss) *
                static_cast<double>(bytes_acked) / state.cwnd;
  state.cwnd = std::max(state.cwnd, static_cast<double>(state.mss));
  state.flightsize = std::max<std::int64_t>(0, state.flightsize - bytes_acked);
  return state;
}

LedbatState LedbatOnLoss(LedbatState state, SimTime now, SimTime rtt) {
  if (state.last_decrease != SimTime::min() &&
      now - state.last_decrease < rtt) {
    return state;
  }
  state.cwnd = std::max(state.cwnd / 2, static_cast<double>(state.mss));
  state.last_decrease = now;
  return state;
}

LedbatState LedbatOnTimeout(LedbatState state, SimTime now) {
  state.cwnd = static_cast<double>(state.mss);
  state.last_decrease = now;
  return state;
}

}  // namespace swarmsim
