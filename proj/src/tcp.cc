#include "swarmsim/tcp.h"

#include <algorithm>
#include <cmath>

namespace swarmsim {
namespace {

constexpr double kCubicC = 0.4;
constexpr double kCubicBeta = 0.7;

double MinSsthresh(const TcpState& s) { return 2.0 * static_cast<double>(s.mss); }

TcpState CubicAvoidance(TcpState s, std::int64_t bytes_acked, SimTime now,
                        SimTime rtt) {
  const double mss = static_cast<double>(s.mss);
  if (s.epoch_start == SimTime::min()) {
    s.epoch_start = now;
    if (s.cwnd < s.w_max) {
      s.cubic_k = std::cbrt((s.w_max - s.cwnd) / mss / kCubicC);
      s.cubic_origin = s.w_max;
    } else {
      s.cubic_k = 0;
      s.cubic_origin = s.cwnd;
    }
    s.reno_estimate = s.cwnd;
  }
  const double t = ToSeconds(now + rtt - s.epoch_start) - s.cubic_k;
  const double target = s.cubic_origin + kCubicC * t * t * t * mss;
  const double acked = static_cast<double>(bytes_acked);
  if (target > s.cwnd) {
    s.cwnd += (target - s.cwnd) / s.cwnd * acked;
  } else {
    s.cwnd += 0.01 * mss * acked / s.cwnd;
  }
  // TCP-friendly region: never grow slower than an AIMD flow would.
  s.reno_estimate += 3.0 * (1 - kCubicBeta) / (1 + kCubicBeta) * mss * acked /
                     s.reno_estimate;
  s.cwnd = std::max(s.cwnd, s.reno_estimate);
  return s;
}

}  // namespace

const char* TcpFlavorName(TcpFlavor flavor) {
  return flavor == TcpFlavor::kCubic ? "cubic" : "newreno";
}

bool ParseTcpFlavor(std::string_view text, TcpFlavor* out) {
  if (text == "newreno") {
    *out = TcpFlavor::kNewReno;
  } else if (text == "cubic") {
    *out = TcpFlavor::kCubic;
  } else {
    return false;
  }
  return true;
}

TcpState MakeTcpState(std::int64_t mss, TcpFlavor flavor,
                      int initial_window_segments) {
  TcpState s;
  s.mss = mss;
  s.flavor = flavor;
  s.cwnd = static_cast<double>(initial_window_segments * mss);
  return s;
}

TcpState TcpOnAck(TcpState s, std::int64_t bytes_acked, SimTime now,
                  SimTime rtt) {
  const double mss = static_cast<double>(s.mss);
  switch (s.phase) {
    case TcpPhase::kFastRecovery:
      return s;
    case TcpPhase::kSlowStart:
      s.cwnd += static_cast<double>(bytes_acked);
      if (s.cwnd >= s.ssthresh) s.phase = TcpPhase::kCongestionAvoidance;
      return s;
    case TcpPhase::kCongestionAvoidance:
      if (s.flavor == TcpFlavor::kCubic) return CubicAvoidance(s, bytes_acked, now, rtt);
      s.cwnd += mss * static_cast<double>(bytes_acked) / s.cwnd;
      return s;
  }
  return s;
}

TcpState TcpOnLoss(TcpState s, LossKind kind, SimTime now) {
  (void)now;
  const double factor = s.flavor == TcpFlavor::kCubic ? kCubicBeta : 0.5;
  s.w_max = s.cwnd;
  s.epoch_start = SimTime::min();
  s.ssthresh = std::max(s.cwnd * factor, MinSsthresh(s));
  s.dup_ack_count = 0;
  if (kind == LossKind::kTripleDupAck) {
    s.cwnd = s.ssthresh;
    s.phase = TcpPhase::kFastRecovery;
  } else {
    s.cwnd = static_cast<double>(s.mss);
    s.phase = TcpPhase::kSlowStart;
  }
  return s;
}

TcpState TcpExitRecovery(TcpState s) {
  if (s.phase != TcpPhase::kFastRecovery) return s;
  s.cwnd = std::max(s.ssthresh, static_cast<double>(s.mss));
  s.phase = TcpPhase::kCongestionAvoidance;
  s.dup_ack_count = 0;
  return s;
}

}  // namespace swarmsim
