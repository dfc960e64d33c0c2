#include "swarmsim/access_link.h"

namespace swarmsim {

AccessLink::AccessLink(Simulator& sim, std::int64_t capacity_bps,
                       std::int64_t buffer_limit_bytes,
                       SimTime propagation_delay, DeliverFn deliver)
    : sim_(sim),
      capacity_bps_(capacity_bps),
      buffer_limit_(buffer_limit_bytes),
      propagation_delay_(propagation_delay),
      deliver_(std::move(deliver)) {
  if (capacity_bps_ <= 0) throw ContractViolation("link capacity must be positive");
  if (buffer_limit_ <= 0) throw ContractViolation("link buffer must be positive");
}

EnqueueResult AccessLink::Enqueue(const Packet& packet) {
  ++counters_.enqueued_packets;
  counters_.enqueued_bytes += packet.size;
  if (occupancy_bytes_ + packet.size > buffer_limit_) {
    ++counters_.dropped_packets;
    counters_.dropped_bytes += packet.size;
    return EnqueueResult::kDropped;
  }
  const SimTime now = sim_.Now();
  occupancy_integral_ += static_cast<double>(occupancy_bytes_) *
                         static_cast<double>((now - last_change_).count());
  last_change_ = now;

  const bool was_idle = fifo_.empty();
  fifo_.push_back(packet);
  occupancy_bytes_ += packet.size;
  if (was_idle) {
    sim_.ScheduleIn(SerializationTime(packet.size, capacity_bps_),
                    EventKind::kPacketDeparture, [this] { OnDeparture(); });
  }
  return EnqueueResult::kAccepted;
}

void AccessLink::OnDeparture() {
  const SimTime now = sim_.Now();
  occupancy_integral_ += static_cast<double>(occupancy_bytes_) *
                         static_cast<double>((now - last_change_).count());
  last_change_ = now;

  Packet packet = std::move(fifo_.front());
  fifo_.pop_front();
  occupancy_bytes_ -= packet.size;
  ++counters_.served_packets;
  counters_.served_bytes += packet.size;
  dequeue_log_.push_back(QueueSample{now, static_cast<std::uint32_t>(occupancy_bytes_),
                                     static_cast<std::uint32_t>(fifo_.size())});

  if (!fifo_.empty()) {
    sim_.ScheduleIn(SerializationTime(fifo_.front().size, capacity_bps_),
                    EventKind::kPacketDeparture, [this] { OnDeparture(); });
  }
  const EventKind arrival =
      packet.kind == PacketKind::kAck ? EventKind::kAckArrival : EventKind::kPacketArrival;
  sim_.ScheduleIn(propagation_delay_, arrival,
                  [this, p = std::move(packet)] { deliver_(p); });
}

bool AccessLink::Conserves() const {
  const auto& c = counters_;
  return c.served_packets + c.dropped_packets + fifo_.size() == c.enqueued_packets &&
         c.served_bytes + c.dropped_bytes + static_cast<std::uint64_t>(occupancy_bytes_) ==
             c.enqueued_bytes;
}

double AccessLink::OccupancyIntegral(SimTime now) const {
  return occupancy_integral_ + static_cast<double>(occupancy_bytes_) *
                                   static_cast<double>((now - last_change_).count());
}

}  // namespace swarmsim
