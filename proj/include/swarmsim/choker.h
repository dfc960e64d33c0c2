#ifndef SWARMSIM_CHOKER_H
#define SWARMSIM_CHOKER_H

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "swarmsim/rng.h"

namespace swarmsim {

struct ChokeCandidate {
  std::uint32_t key;   // caller's neighbor index
  std::uint64_t rate;  // bytes over the ranking window
};

struct UnchokeDecision {
  std::vector<std::uint32_t> regular;
  std::optional<std::uint32_t> optimistic;
};

// Tit-for-tat unchoke set over the interested neighbors. With no more
// candidates than |slots| everyone is unchoked. Otherwise the best
// |slots| - 1 by rate (random tie-break) get regular slots and one of the
// rest gets the optimistic slot: the current holder keeps it unless
// |rotate_optimistic| is set or it was promoted to a regular slot.
UnchokeDecision SelectUnchoked(std::span<const ChokeCandidate> interested, int slots,
                               std::optional<std::uint32_t> current_optimistic,
                               bool rotate_optimistic, RngStream& rng);

}  // namespace swarmsim

#endif  // SWARMSIM_CHOKER_H
