#ifndef SWARMSIM_PIECE_PICKER_H
#define SWARMSIM_PIECE_PICKER_H

#include <cstdint>
#include <optional>
#include <span>

#include "swarmsim/rng.h"

namespace swarmsim {

// Rarest-first choice of the next chunk to fetch from a neighbor.
//
// Candidates are chunks the neighbor holds that are neither held locally
// nor already in flight from some other neighbor. Among them the ones with
// the smallest locally known availability win; ties are broken uniformly at
// random. All spans are indexed by chunk.
std::optional<std::uint32_t> SelectNextChunk(std::span<const std::uint8_t> held,
                                             std::span<const std::uint8_t> in_flight,
                                             std::span<const std::uint8_t> neighbor_has,
                                             std::span<const int> availability,
                                             RngStream& rng);

}  // namespace swarmsim

#endif  // SWARMSIM_PIECE_PICKER_H
