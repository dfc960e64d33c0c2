#ifndef SWARMSIM_TCP_H
#define SWARMSIM_TCP_H

#include <cstdint>
#include <limits>
#include <string_view>

#include "swarmsim/sim_time.h"

namespace swarmsim {

enum class TcpPhase : std::uint8_t {
  kSlowStart,
  kCongestionAvoidance,
  kFastRecovery,
};
enum class TcpFlavor : std::uint8_t { kNewReno, kCubic };
enum class LossKind : std::uint8_t { kTripleDupAck, kTimeout };

const char* TcpFlavorName(TcpFlavor flavor);
bool ParseTcpFlavor(std::string_view text, TcpFlavor* out);

struct TcpState {
  double cwnd = 3.0 * 1448;
  double ssthresh = std::numeric_limits<double>::infinity();
  TcpPhase phase = TcpPhase::kSlowStart;
  int dup_ack_count = 0;
  std::int64_t mss = 1448;
  TcpFlavor flavor = TcpFlavor::kNewReno;

  // Cubic growth bookkeeping (unused for NewReno).
  double w_max = 0;  // window before the last reduction, bytes
  SimTime epoch_start = SimTime::min();
  double cubic_origin = 0;  // bytes
  double cubic_k = 0;  // seconds
  double reno_estimate = 0;  // bytes, for the TCP-friendly floor
};

TcpState MakeTcpState(std::int64_t mss, TcpFlavor flavor,
                      int initial_window_segments = 3);

// Window growth for |bytes_acked| (> 0) newly acknowledged bytes. A
// FastRecovery state is left unchanged; use TcpExitRecovery on the ack that
// covers the recovery point. |now| and |rtt| drive Cubic only.
TcpState TcpOnAck(TcpState state, std::int64_t bytes_acked, SimTime now = {},
                  SimTime rtt = {});

TcpState TcpOnLoss(TcpState state, LossKind kind, SimTime now = {});

// Full acknowledgement of the recovery point: deflate to ssthresh.
TcpState TcpExitRecovery(TcpState state);

}  // namespace swarmsim

#endif  // SWARMSIM_TCP_H
