#ifndef SWARMSIM_TESTBED_H
#define SWARMSIM_TESTBED_H

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "swarmsim/access_link.h"
#include "swarmsim/packet.h"
#include "swarmsim/stream.h"

namespace swarmsim {

// Long-lived flows from one host to another through a single access uplink.
// Acks return over the receiver's own (otherwise idle) uplink.
struct BottleneckSpec {
  std::int64_t capacity_bps = 5'000'000;
  double buffer_seconds = 1.0;
  SimTime propagation = 1ms;
  SimTime duration = 60s;
  // Delay statistics ignore samples before this point.
  SimTime warmup = 5s;
  SimTime sample_interval = 10ms;
  TransportParams params;
  // Optional hook invoked at every sample point with the live senders.
  std::function<void(SimTime, std::span<const StreamSender* const>)> observer;
};

struct BulkFlowSpec {
  Protocol protocol = Protocol::kUtp;
  SimTime target = 100ms;  // LEDBAT only
  SimTime start = kZeroTime;
};

struct FlowOutcome {
  Protocol protocol;
  std::uint64_t delivered_bytes = 0;  // in-order payload at the receiver
  // Time average of the sender's estimated queuing delay after warmup
  // (LEDBAT flows; zero for TCP).
  double mean_estimated_queuing_delay_ms = 0;
  SenderStats sender;
};

struct BottleneckOutcome {
  std::vector<FlowOutcome> flows;
  double utilization = 0;  // wire bits served / (capacity * duration)
  double mean_queue_delay_ms = 0;  // time-weighted occupancy at the bottleneck
  LinkCounters bottleneck;
  bool conserved = false;
};

BottleneckOutcome RunBottleneck(const BottleneckSpec& spec,
                                std::span<const BulkFlowSpec> flows);

}  // namespace swarmsim

#endif  // SWARMSIM_TESTBED_H
