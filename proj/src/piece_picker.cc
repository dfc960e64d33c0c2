#include "swarmsim/piece_picker.h"

#include <limits>
#include <vector>

namespace swarmsim {

std::optional<std::uint32_t> SelectNextChunk(std::span<const std::uint8_t> held,
                                             std::span<const std::uint8_t> in_flight,
                                             std::span<const std::uint8_t> neighbor_has,
                                             std::span<const int> availability,
                                             RngStream& rng) {
  int rarest = std::numeric_limits<int>::max();
  std::vector<std::uint32_t> ties;
  for (std::uint32_t c = 0; c < held.size(); ++c) {
    if (held[c] || in_flight[c] || !neighbor_has[c]) continue;
    if (availability[c] < rarest) {
      rarest = availability[c];
      ties.clear();
    }
    if (availability[c] == rarest) ties.push_back(c);
  }
  if (ties.empty()) return std::nullopt;
  return ties[rng.UniformBelow(ties.size())];
}

}  // namespace swarmsim
