#include "swarmsim/choker.h"

#include <algorithm>

namespace swarmsim {

UnchokeDecision SelectUnchoked(std::span<const ChokeCandidate> interested, int slots,
                               std::optional<std::uint32_t> current_optimistic,
                               bool rotate_optimistic, RngStream& rng) {
  UnchokeDecision decision;
  if (slots <= 0) return decision;
  if (interested.size() <= static_cast<std::size_t>(slots)) {
    for (const auto& c : interested) decision.regular.push_back(c.key);
    return decision;
  }

  std::vector<ChokeCandidate> ranked(interested.begin(), interested.end());
  rng.Shuffle(std::span(ranked));
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const ChokeCandidate& a, const ChokeCandidate& b) { return a.rate > b.rate; });

  const auto regular_slots = static_cast<std::size_t>(slots - 1);
  for (std::size_t i = 0; i < regular_slots; ++i) decision.regular.push_back(ranked[i].key);

  std::vector<std::uint32_t> rest;
  for (std::size_t i = regular_slots; i < ranked.size(); ++i) rest.push_back(ranked[i].key);
  std::sort(rest.begin(), rest.end());
  if (!rotate_optimistic && current_optimistic &&
      std::binary_search(rest.begin(), rest.end(), *current_optimistic)) {
    decision.optimistic = current_optimistic;
  } else {
    decision.optimistic = rest[rng.UniformBelow(rest.size())];
  }
  return decision;
}

}  // namespace swarmsim
