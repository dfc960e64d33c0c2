#ifndef SWARMSIM_ACCESS_LINK_H
#define SWARMSIM_ACCESS_LINK_H

#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "swarmsim/packet.h"
#include "swarmsim/simulator.h"

namespace swarmsim {

// Queue occupancy right after a dequeue.
struct QueueSample {
  SimTime time;
  std::uint32_t bytes;
  std::uint32_t packets;
};

enum class EnqueueResult : std::uint8_t { kAccepted, kDropped };

struct LinkCounters {
  std::uint64_t enqueued_packets = 0;
  std::uint64_t served_packets = 0;
  std::uint64_t dropped_packets = 0;
  std::uint64_t enqueued_bytes = 0;
  std::uint64_t served_bytes = 0;
  std::uint64_t dropped_bytes = 0;
};

// Capacity-limited droptail FIFO feeding a fixed propagation delay; models
// a home-gateway uplink. The packet being serialized stays in the FIFO (and
// in the occupancy) until its last bit leaves.
class AccessLink {
 public:
  using DeliverFn = std::function<void(const Packet&)>;

  AccessLink(Simulator& sim, std::int64_t capacity_bps,
             std::int64_t buffer_limit_bytes, SimTime propagation_delay,
             DeliverFn deliver);

  AccessLink(const AccessLink&) = delete;
  AccessLink& operator=(const AccessLink&) = delete;

  EnqueueResult Enqueue(const Packet& packet);

  std::int64_t capacity_bps() const { return capacity_bps_; }
  std::int64_t buffer_limit() const { return buffer_limit_; }
  SimTime propagation_delay() const { return propagation_delay_; }
  std::int64_t occupancy_bytes() const { return occupancy_bytes_; }
  std::size_t occupancy_packets() const { return fifo_.size(); }
  bool busy() const { return !fifo_.empty(); }

  const LinkCounters& counters() const { return counters_; }
  const std::vector<QueueSample>& dequeue_log() const { return dequeue_log_; }

  // served + dropped + queued == enqueued, for packets and for bytes.
  bool Conserves() const;

  // Integral of occupancy over time (byte-microseconds) up to |now|.
  double OccupancyIntegral(SimTime now) const;

 private:
  void OnDeparture();

  Simulator& sim_;
  std::int64_t capacity_bps_;
  std::int64_t buffer_limit_;
  SimTime propagation_delay_;
  DeliverFn deliver_;

  std::deque<Packet> fifo_;
  std::int64_t occupancy_bytes_ = 0;
  LinkCounters counters_;
  std::vector<QueueSample> dequeue_log_;

  double occupancy_integral_ = 0;
  SimTime last_change_ = kZeroTime;
};

// Buffer sized to hold |seconds| worth of traffic at |capacity_bps|.
inline std::int64_t BufferForSeconds(std::int64_t capacity_bps, double seconds) {
  return static_cast<std::int64_t>(static_cast<double>(capacity_bps) / 8.0 * seconds);
}

}  // namespace swarmsim

#endif  // SWARMSIM_ACCESS_LINK_H
