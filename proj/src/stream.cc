#include "swarmsim/stream.h"

#include <algorithm>

namespace swarmsim {
namespace {

constexpr int kDupAckThreshold = 3;
constexpr int kMaxBackoff = 64;

}  // namespace

StreamSender::StreamSender(Simulator& sim, Protocol protocol,
                           const TransportParams& params, EmitFn emit)
    : sim_(sim), protocol_(protocol), params_(params), emit_(std::move(emit)) {
  if (protocol == Protocol::kUtp) {
    controller_ = MakeLedbatState(params.mss, params.ledbat_target, params.ledbat_gain,
                                  params.ledbat_initial_window);
  } else {
    controller_ = MakeTcpState(params.mss, params.tcp_flavor, params.tcp_initial_window);
  }
}

double StreamSender::cwnd() const {
  return std::visit([](const auto& s) { return s.cwnd; }, controller_);
}

SimTime StreamSender::rto() const {
  SimTime base = params_.initial_rto;
  if (have_rtt_) base = std::max(params_.min_rto, srtt_ * params_.rto_srtt_multiplier);
  return base * backoff_;
}

void StreamSender::Push(BlockRef block, std::uint32_t bytes) {
  const auto mss = static_cast<std::uint32_t>(params_.mss);
  while (bytes > 0) {
    const std::uint32_t n = std::min(bytes, mss);
    pending_.push_back(Segment{block, n, false, false});
    bytes -= n;
  }
  TrySend();
}

double StreamSender::Allowance() const {
  double allowance = cwnd();
  // Each duplicate ack during recovery means one segment left the network.
  if (recovery_ == Recovery::kFast) allowance += static_cast<double>(dupacks_ * params_.mss);
  return allowance;
}

void StreamSender::TrySend() {
  for (;;) {
    std::uint32_t size;
    if (!lost_.empty()) {
      size = At(*lost_.begin()).payload;
    } else if (!pending_.empty()) {
      size = pending_.front().payload;
    } else {
      cwnd_limited_ = false;
      return;
    }
    if (flight_ > 0 && static_cast<double>(flight_ + size) > Allowance()) {
      cwnd_limited_ = true;
      return;
    }
    if (!lost_.empty()) {
      const std::uint64_t seq = *lost_.begin();
      lost_.erase(lost_.begin());
      Transmit(seq, true);
    } else {
      outstanding_.push_back(pending_.front());
      pending_.pop_front();
      Transmit(snd_nxt_++, false);
    }
  }
}

void StreamSender::Transmit(std::uint64_t seq, bool retransmission) {
  Segment& seg = At(seq);
  seg.lost = false;
  if (!seg.in_flight) {
    seg.in_flight = true;
    flight_ += seg.payload;
  }
  ++stats_.segments_sent;
  if (retransmission) ++stats_.retransmissions;

  Packet p;
  p.protocol = protocol_;
  p.kind = PacketKind::kData;
  p.size = seg.payload + (kMtuBytes - static_cast<std::uint32_t>(params_.mss));
  p.send_timestamp = sim_.Now();
  p.seq = seq;
  p.payload = seg.payload;
  p.block = seg.block;
  if (auto* l = std::get_if<LedbatState>(&controller_)) l->flightsize = flight_;
  if (!timer_armed_) ArmTimer();
  emit_(std::move(p));
}

void StreamSender::ForceRetransmit(std::uint64_t seq) {
  Segment& seg = At(seq);
  if (seg.in_flight) {
    seg.in_flight = false;
    flight_ -= seg.payload;
  }
  lost_.erase(seq);
  Transmit(seq, true);
}

void StreamSender::UpdateRtt(SimTime sample) {
  if (!have_rtt_) {
    srtt_ = sample;
    have_rtt_ = true;
  } else {
    srtt_ = srtt_ + (sample - srtt_) / 8;
  }
}

void StreamSender::OnAck(const Packet& ack) {
  const SimTime now = sim_.Now();
  if (ack.ack_next > snd_una_) {
    const std::int64_t flight_before = flight_;
    const std::uint64_t acked_segments = ack.ack_next - snd_una_;
    std::int64_t newly_acked = 0;
    while (snd_una_ < ack.ack_next && !outstanding_.empty()) {
      Segment& seg = outstanding_.front();
      newly_acked += seg.payload;
      if (seg.in_flight) flight_ -= seg.payload;
      if (seg.lost) lost_.erase(snd_una_);
      outstanding_.pop_front();
      ++snd_una_;
    }
    stats_.bytes_acked += static_cast<std::uint64_t>(newly_acked);
    UpdateRtt(now - ack.echo_timestamp);
    backoff_ = 1;

    bool restart_timer = true;
    if (recovery_ != Recovery::kNone && snd_una_ > recover_) {
      if (recovery_ == Recovery::kFast) {
        if (auto* t = std::get_if<TcpState>(&controller_)) *t = TcpExitRecovery(*t);
      }
      recovery_ = Recovery::kNone;
      dupacks_ = 0;
    } else if (recovery_ == Recovery::kFast) {
      // Partial ack. Segments it covers beyond the repaired hole were
      // already counted as departed through their duplicate acks.
      const auto departed = static_cast<int>(std::min<std::uint64_t>(
          acked_segments - 1, static_cast<std::uint64_t>(dupacks_)));
      dupacks_ -= departed;
      // Impatient variant: only the first partial ack restarts the timer, so
      // a window with many holes falls back to timeout recovery.
      restart_timer = !partial_ack_seen_;
      partial_ack_seen_ = true;
      if (!outstanding_.empty()) ForceRetransmit(snd_una_);
    } else {
      dupacks_ = 0;
    }

    if (auto* l = std::get_if<LedbatState>(&controller_)) {
      l->flightsize = flight_before;
      *l = LedbatOnAck(*l, ack.owd_sample, newly_acked);
      if (params_.ledbat_allowed_increase > 0) {
        const double max_allowed = static_cast<double>(
            flight_before + params_.ledbat_allowed_increase * params_.mss);
        l->cwnd = std::max(std::min(l->cwnd, max_allowed), static_cast<double>(l->mss));
      }
      l->flightsize = flight_;
    } else if (auto* t = std::get_if<TcpState>(&controller_)) {
      if (recovery_ != Recovery::kFast && cwnd_limited_) {
        *t = TcpOnAck(*t, newly_acked, now, srtt_);
      }
    }

    if (outstanding_.empty()) {
      timer_armed_ = false;
    } else if (restart_timer) {
      ArmTimer();
    }
  } else if (ack.ack_next == snd_una_ && !outstanding_.empty()) {
    ++dupacks_;
    if (auto* t = std::get_if<TcpState>(&controller_)) t->dup_ack_count = dupacks_;
    if (recovery_ == Recovery::kNone && dupacks_ == kDupAckThreshold) {
      recovery_ = Recovery::kFast;
      partial_ack_seen_ = false;
      recover_ = snd_nxt_ - 1;
      ++stats_.fast_retransmits;
      if (auto* t = std::get_if<TcpState>(&controller_)) {
        *t = TcpOnLoss(*t, LossKind::kTripleDupAck, now);
      } else if (auto* l = std::get_if<LedbatState>(&controller_)) {
        *l = LedbatOnLoss(*l, now, have_rtt_ ? srtt_ : params_.initial_rto);
      }
      ForceRetransmit(snd_una_);
    }
  }
  TrySend();
}

void StreamSender::ArmTimer() {
  rto_deadline_ = sim_.Now() + rto();
  timer_armed_ = true;
  if (timer_pending_) return;
  timer_pending_ = true;
  sim_.Schedule(rto_deadline_, EventKind::kTimerExpiry, [this] { OnTimer(); });
}

void StreamSender::OnTimer() {
  timer_pending_ = false;
  if (!timer_armed_ || outstanding_.empty()) return;
  if (sim_.Now() < rto_deadline_) {
    timer_pending_ = true;
    sim_.Schedule(rto_deadline_, EventKind::kTimerExpiry, [this] { OnTimer(); });
    return;
  }
  OnTimeout();
}

void StreamSender::OnTimeout() {
  const SimTime now = sim_.Now();
  ++stats_.timeouts;
  std::uint64_t seq = snd_una_;
  for (Segment& seg : outstanding_) {
    if (seg.in_flight) {
      seg.in_flight = false;
      flight_ -= seg.payload;
    }
    seg.lost = true;
    lost_.insert(seq++);
  }
  recovery_ = Recovery::kLoss;
  recover_ = snd_nxt_ - 1;
  dupacks_ = 0;
  if (auto* t = std::get_if<TcpState>(&controller_)) {
    *t = TcpOnLoss(*t, LossKind::kTimeout, now);
  } else if (auto* l = std::get_if<LedbatState>(&controller_)) {
    *l = LedbatOnTimeout(*l, now);
  }
  backoff_ = std::min(backoff_ * 2, kMaxBackoff);
  ArmTimer();
  TrySend();
}

Packet StreamReceiver::OnData(const Packet& data, SimTime now,
                              std::vector<Delivery>& delivered) {
  if (data.seq == rcv_nxt_) {
    delivered.push_back(Delivery{data.block, data.payload});
    ++rcv_nxt_;
    for (auto it = out_of_order_.begin();
         it != out_of_order_.end() && it->first == rcv_nxt_;
         it = out_of_order_.erase(it)) {
      delivered.push_back(it->second);
      ++rcv_nxt_;
    }
  } else if (data.seq > rcv_nxt_) {
    if (!out_of_order_.emplace(data.seq, Delivery{data.block, data.payload}).second) {
      ++duplicates_;
    }
  } else {
    ++duplicates_;
  }

  Packet ack;
  ack.protocol = data.protocol;
  ack.kind = PacketKind::kAck;
  ack.connection = data.connection;
  ack.size = kAckBytes;
  ack.send_timestamp = now;
  ack.ack_next = rcv_nxt_;
  ack.echo_timestamp = data.send_timestamp;
  ack.owd_sample = OwdAtReceiver(data, now);
  return ack;
}

}  // namespace swarmsim
