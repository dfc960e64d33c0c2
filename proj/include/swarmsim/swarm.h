#ifndef SWARMSIM_SWARM_H
#define SWARMSIM_SWARM_H

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swarmsim/access_link.h"
#include "swarmsim/config.h"
#include "swarmsim/simulator.h"

namespace swarmsim {

struct PeerRecord {
  std::uint32_t id = 0;
  bool initial_seed = false;
  std::string class_name;  // "seed" for initial seeds
  int disposition = 31;
  std::int64_t uplink_bps = 0;
  std::optional<SimTime> completion;
  std::vector<QueueSample> dequeue_log;
  LinkCounters link;
  bool link_conserved = true;
  double occupancy_integral = 0;  // byte-microseconds up to the end of the run
  std::uint64_t uploaded_bytes = 0;
  std::uint64_t downloaded_bytes = 0;
  std::uint64_t duplicate_blocks = 0;
};

struct ConnectionRecord {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  Protocol protocol = Protocol::kUtp;
  bool utp_feasible = false;
  std::uint64_t data_bytes = 0;
};

struct RunRecord {
  std::string scenario;
  std::uint64_t seed = 0;
  std::uint64_t config_digest = 0;
  SimTime end_time{};
  std::vector<PeerRecord> peers;
  std::vector<ConnectionRecord> connections;
  // Indexed by Protocol. Data counts block payload handed to the
  // application; wire counts every delivered packet including headers, acks
  // and control.
  std::array<std::uint64_t, 2> data_bytes{};
  std::array<std::uint64_t, 2> wire_bytes{};
  std::uint64_t integrity_violations = 0;
  std::uint64_t control_retries = 0;
  Simulator::Stats events;
};

// Thrown when the run stalls with leechers still incomplete. The message
// describes the disposition graph, e.g. which leechers cannot reach a seed.
class SwarmDeadlock : public DeadlockError {
 public:
  SwarmDeadlock(SimTime at, const std::string& what, int incomplete, int unreachable)
      : DeadlockError(at, what), incomplete_(incomplete), unreachable_(unreachable) {}
  int incomplete() const { return incomplete_; }
  int unreachable() const { return unreachable_; }

 private:
  int incomplete_;
  int unreachable_;
};

// Runs one flash-crowd replication until every leecher completes or the
// configured time limit passes (also reported as SwarmDeadlock).
RunRecord RunSwarm(const ScenarioConfig& config, std::uint64_t seed);

// Peers (by id) that have no chain of feasible connections to an initial
// seed. Ids follow RunSwarm's layout: seeds first, then classes in order.
std::vector<std::uint32_t> PeersCutOffFromSeeds(const ScenarioConfig& config);

}  // namespace swarmsim

#endif  // SWARMSIM_SWARM_H
