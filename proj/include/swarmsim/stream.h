#ifndef SWARMSIM_STREAM_H
#define SWARMSIM_STREAM_H

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <variant>
#include <vector>

#include "swarmsim/ledbat.h"
#include "swarmsim/packet.h"
#include "swarmsim/simulator.h"
#include "swarmsim/tcp.h"

namespace swarmsim {

struct TransportParams {
  std::int64_t mss = kDefaultMss;
  SimTime ledbat_target = 100ms;
  double ledbat_gain = 1.0;
  int ledbat_initial_window = 2;
  // Per-ack bound cwnd <= flightsize + allowed_increase * mss; <= 0 disables.
  int ledbat_allowed_increase = 1;
  TcpFlavor tcp_flavor = TcpFlavor::kNewReno;
  int tcp_initial_window = 3;
  SimTime min_rto = 200ms;
  SimTime initial_rto = 1s;
  int rto_srtt_multiplier = 4;

  bool operator==(const TransportParams&) const = default;
};

struct SenderStats {
  std::uint64_t segments_sent = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t fast_retransmits = 0;
  std::uint64_t timeouts = 0;
  std::uint64_t bytes_acked = 0;
};

// Sending half of one direction of a connection: packetizes application
// blocks, keeps them reliable (cumulative acks, triple-dupack fast
// retransmit with NewReno partial-ack recovery, retransmission timeout), and
// paces them with either a LEDBAT or a TCP window.
class StreamSender {
 public:
  // Receives a fully built data packet except for addressing.
  using EmitFn = std::function<void(Packet&&)>;

  StreamSender(Simulator& sim, Protocol protocol, const TransportParams& params,
               EmitFn emit);
  StreamSender(const StreamSender&) = delete;
  StreamSender& operator=(const StreamSender&) = delete;

  // Queues |bytes| of payload belonging to |block| and sends what the window
  // allows.
  void Push(BlockRef block, std::uint32_t bytes);
  void OnAck(const Packet& ack);

  Protocol protocol() const { return protocol_; }
  double cwnd() const;
  std::int64_t flight_bytes() const { return flight_; }
  std::size_t unsent_segments() const { return pending_.size(); }
  bool idle() const { return pending_.empty() && outstanding_.empty(); }
  SimTime srtt() const { return srtt_; }
  SimTime rto() const;
  const SenderStats& stats() const { return stats_; }

  // Set for LEDBAT senders, null otherwise (and vice versa).
  const LedbatState* ledbat() const { return std::get_if<LedbatState>(&controller_); }
  const TcpState* tcp() const { return std::get_if<TcpState>(&controller_); }

 private:
  struct Segment {
    BlockRef block;
    std::uint32_t payload;
    bool in_flight;
    bool lost;
  };

  double Allowance() const;
  void TrySend();
  void Transmit(std::uint64_t seq, bool retransmission);
  void ForceRetransmit(std::uint64_t seq);
  void UpdateRtt(SimTime sample);
  void ArmTimer();
  void OnTimer();
  void OnTimeout();
  Segment& At(std::uint64_t seq) { return outstanding_[seq - snd_una_]; }

  Simulator& sim_;
  Protocol protocol_;
  TransportParams params_;
  EmitFn emit_;
  std::variant<LedbatState, TcpState> controller_;

  std::deque<Segment> pending_;      // never sent
  std::deque<Segment> outstanding_;  // seq in [snd_una_, snd_nxt_)
  std::set<std::uint64_t> lost_;     // awaiting retransmission
  std::uint64_t snd_una_ = 0;
  std::uint64_t snd_nxt_ = 0;
  std::int64_t flight_ = 0;
  bool cwnd_limited_ = false;

  // kFast: triple-dupack NewReno recovery with window inflation.
  // kLoss: after a timeout; every outstanding segment is resent in order
  // under a slow-starting window.
  enum class Recovery : std::uint8_t { kNone, kFast, kLoss };

  int dupacks_ = 0;
  Recovery recovery_ = Recovery::kNone;
  bool partial_ack_seen_ = false;
  std::uint64_t recover_ = 0;

  SimTime srtt_{};
  bool have_rtt_ = false;
  int backoff_ = 1;
  SimTime rto_deadline_{};
  bool timer_armed_ = false;
  bool timer_pending_ = false;  // an expiry event is in the queue

  SenderStats stats_;
};

// Receiving half: reorders by sequence number, hands in-order payload to the
// application and produces one cumulative ack per data packet.
class StreamReceiver {
 public:
  struct Delivery {
    BlockRef block;
    std::uint32_t payload;
  };

  // Appends the newly in-order payload to |delivered| and returns the ack to
  // send back (addressing left to the caller).
  Packet OnData(const Packet& data, SimTime now, std::vector<Delivery>& delivered);

  std::uint64_t next_expected() const { return rcv_nxt_; }
  std::uint64_t duplicate_segments() const { return duplicates_; }

 private:
  std::uint64_t rcv_nxt_ = 0;
  std::map<std::uint64_t, Delivery> out_of_order_;
  std::uint64_t duplicates_ = 0;
};

}  // namespace swarmsim

#endif  // SWARMSIM_STREAM_H
