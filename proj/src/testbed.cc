#include "swarmsim/testbed.h"

#include <memory>

#include "swarmsim/access_link.h"

namespace swarmsim {

BottleneckOutcome RunBottleneck(const BottleneckSpec& spec,
                                std::span<const BulkFlowSpec> flows) {
  Simulator sim;
  const std::int64_t buffer = BufferForSeconds(spec.capacity_bps, spec.buffer_seconds);

  std::vector<std::unique_ptr<StreamSender>> senders;
  std::vector<StreamReceiver> receivers(flows.size());
  std::vector<FlowOutcome> outcome(flows.size());
  std::vector<StreamReceiver::Delivery> scratch;

  AccessLink* reverse_ptr = nullptr;
  AccessLink forward(sim, spec.capacity_bps, buffer, spec.propagation,
                     [&](const Packet& p) {
                       scratch.clear();
                       Packet ack = receivers[p.connection].OnData(p, sim.Now(), scratch);
                       for (const auto& d : scratch) outcome[p.connection].delivered_bytes += d.payload;
                       ack.src = p.dst;
                       ack.dst = p.src;
                       reverse_ptr->Enqueue(ack);
                     });
  AccessLink reverse(sim, spec.capacity_bps, buffer, spec.propagation,
                     [&](const Packet& p) { senders[p.connection]->OnAck(p); });
  reverse_ptr = &reverse;

  const std::uint64_t backlog =
      static_cast<std::uint64_t>(spec.capacity_bps / 8) *
      static_cast<std::uint64_t>(ToSeconds(spec.duration) + 1);
  for (std::size_t i = 0; i < flows.size(); ++i) {
    TransportParams params = spec.params;
    params.ledbat_target = flows[i].target;
    const auto id = static_cast<std::uint32_t>(i);
    senders.push_back(std::make_unique<StreamSender>(
        sim, flows[i].protocol, params, [&forward, id](Packet&& p) {
          p.src = PeerId{0};
          p.dst = PeerId{1};
          p.connection = id;
          forward.Enqueue(p);
        }));
    outcome[i].protocol = flows[i].protocol;
    sim.Schedule(flows[i].start, EventKind::kTimerExpiry, [&senders, i, backlog] {
      constexpr std::uint32_t kBlock = 16384;
      for (std::uint64_t pushed = 0, n = 0; pushed < backlog; pushed += kBlock, ++n) {
        senders[i]->Push(BlockRef{static_cast<std::uint32_t>(n / 16),
                                  static_cast<std::uint32_t>(n % 16)},
                         kBlock);
      }
    });
  }

  std::vector<double> delay_sum(flows.size(), 0.0);
  std::size_t samples = 0;
  std::vector<const StreamSender*> views;
  for (const auto& s : senders) views.push_back(s.get());
  for (SimTime t = kZeroTime; t < spec.duration; t += spec.sample_interval) {
    sim.Schedule(t, EventKind::kMetricsSample, [&] {
      if (spec.observer) spec.observer(sim.Now(), views);
      if (sim.Now() < spec.warmup) return;
      ++samples;
      for (std::size_t i = 0; i < senders.size(); ++i) {
        if (const LedbatState* l = senders[i]->ledbat()) {
          delay_sum[i] += ToMilliseconds(LedbatQueuingDelay(*l));
        }
      }
    }, /*housekeeping=*/true);
  }

  sim.RunUntilTime(spec.duration);

  BottleneckOutcome result;
  for (std::size_t i = 0; i < flows.size(); ++i) {
    if (samples > 0) outcome[i].mean_estimated_queuing_delay_ms = delay_sum[i] / samples;
    outcome[i].sender = senders[i]->stats();
  }
  result.flows = std::move(outcome);
  result.bottleneck = forward.counters();
  result.utilization = static_cast<double>(forward.counters().served_bytes) * 8.0 /
                       (static_cast<double>(spec.capacity_bps) * ToSeconds(spec.duration));
  result.mean_queue_delay_ms = forward.OccupancyIntegral(sim.Now()) /
                               static_cast<double>(spec.duration.count()) * 8.0 /
                               static_cast<double>(spec.capacity_bps) * 1e3;
  result.conserved = forward.Conserves() && reverse.Conserves();
  return result;
}

}  // namespace swarmsim
