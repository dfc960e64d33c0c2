#ifndef SWARMSIM_CONFIG_H
#define SWARMSIM_CONFIG_H

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "swarmsim/sim_time.h"
#include "swarmsim/stream.h"

namespace swarmsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A group of leechers sharing transport settings. Either |count| peers all
// use |disposition|, or |dispositions| lists one value per peer.
struct PeerClass {
  std::string name;
  int count = 0;
  int disposition = 31;
  std::vector<int> dispositions;
  std::int64_t uplink_bps = 1'000'000;
  SimTime target = 100ms;

  int size() const { return dispositions.empty() ? count : static_cast<int>(dispositions.size()); }
  int DispositionOf(int i) const { return dispositions.empty() ? disposition : dispositions[i]; }
  bool operator==(const PeerClass&) const = default;
};

struct ScenarioConfig {
  std::string name = "scenario";

  // Initial seeds always run the default disposition (31).
  int seed_count = 1;
  std::int64_t seed_uplink_bps = 1'000'000;
  std::vector<PeerClass> classes;

  std::int64_t file_size = 10 * 1024 * 1024;
  std::int64_t chunk_size = 256 * 1024;
  std::int64_t block_size = 16 * 1024;

  double buffer_seconds = 1.0;  // B = C * buffer_seconds
  SimTime base_owd = 1ms;

  int pipeline_depth = 5;
  int upload_slots = 4;
  SimTime rechoke_interval = 10s;
  SimTime optimistic_interval = 30s;
  SimTime rate_window = 20s;

  TransportParams transport;
  // Probability that a pair whose uTP and TCP handshakes race ends up on
  // TCP.
  double utp_race_loss = 0.15;

  std::vector<std::uint64_t> seeds = {1, 2, 3};
  SimTime time_limit = 36000s;

  int leecher_count() const;
  int peer_count() const { return seed_count + leecher_count(); }
  std::uint32_t chunk_count() const {
    return static_cast<std::uint32_t>((file_size + chunk_size - 1) / chunk_size);
  }

  bool operator==(const ScenarioConfig&) const = default;
};

// Throws ConfigError describing the first violated constraint.
void Validate(const ScenarioConfig& config);

// INI-style text. Unknown sections or keys are errors.
ScenarioConfig ParseConfig(std::string_view text);
ScenarioConfig LoadConfig(const std::string& path);
std::string SerializeConfig(const ScenarioConfig& config);

// Digest of everything but the RNG seed list; runs with equal digests are
// replications of one experiment.
std::uint64_t ConfigDigest(const ScenarioConfig& config);

}  // namespace swarmsim

#endif  // SWARMSIM_CONFIG_H
