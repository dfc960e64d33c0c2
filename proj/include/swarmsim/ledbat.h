#ifndef SWARMSIM_LEDBAT_H
#define SWARMSIM_LEDBAT_H

#include <cstdint>

#include "swarmsim/sim_time.h"

namespace swarmsim {

// Delay-based lower-than-best-effort window controller (uTP).
//
// The controller compares the current one-way delay against the smallest
// one-way delay ever seen. Their difference estimates the queuing delay; the
// window grows while it is below |target| and shrinks above it, in
// proportion to the normalized offset.
struct LedbatState {
  double cwnd = 2.0 * 1448;  // bytes
  std::int64_t flightsize = 0;
  SimTime base_delay = SimTime::max();
  SimTime last_owd{};
  SimTime target = 100ms;
  double gain = 1.0;
  std::int64_t mss = 1448;
  // Time of the last multiplicative decrease; losses within one RTT of it
  // are folded into the same reaction.
  SimTime last_decrease = SimTime::min();
};

LedbatState MakeLedbatState(std::int64_t mss, SimTime target, double gain,
                            int initial_window_segments = 2);

SimTime LedbatQueuingDelay(const LedbatState& state);

// Feeds one acknowledgement carrying |owd_sample| that newly acknowledged
// |bytes_acked| bytes (> 0).
LedbatState LedbatOnAck(LedbatState state, SimTime owd_sample,
                        std::int64_t bytes_acked);

// Halves the window, at most once per |rtt|.
LedbatState LedbatOnLoss(LedbatState state, SimTime now, SimTime rtt);

// Retransmission timeout: the window collapses to one segment.
LedbatState LedbatOnTimeout(LedbatState state, SimTime now);

}  // namespace swarmsim

#endif  // SWARMSIM_LEDBAT_H
