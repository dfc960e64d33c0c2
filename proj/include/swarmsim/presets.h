#ifndef SWARMSIM_PRESETS_H
#define SWARMSIM_PRESETS_H

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swarmsim/config.h"

namespace swarmsim {

// Built-in experiments. Full-scale presets run 1 seed + 75 leechers on a
// 100 MiB file; desk-* presets run 1 seed + 23 leechers on 10 MiB. Names
// ending in -2m / -5m use that uplink capacity instead of 1 Mbps.
std::vector<std::string> PresetNames();
std::optional<ScenarioConfig> FindPreset(std::string_view name);

// Leecher split for heterogeneous swarms: |tcp_percent| of |leechers|
// prefer TCP (disposition 13), the rest prefer uTP (14).
ScenarioConfig HeterogeneousSwarm(std::string name, int leechers, int tcp_percent);
ScenarioConfig HomogeneousSwarm(std::string name, int leechers, int disposition);

}  // namespace swarmsim

#endif  // SWARMSIM_PRESETS_H
