#ifndef SWARMSIM_RNG_H
#define SWARMSIM_RNG_H

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace swarmsim {

// Seeded pseudo-random stream. Bounded draws are done here rather than via
// <random> distributions so that results are identical across standard
// library implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  // Independent stream for one stochastic concern of a run. Substreams of
  // different names never share state, so adding draws to one concern leaves
  // the others untouched.
  static RngStream Substream(std::uint64_t root_seed, std::string_view name);

  std::uint64_t Next() { return engine_(); }

  // Uniform integer in [0, bound). |bound| must be positive.
  std::uint64_t UniformBelow(std::uint64_t bound);

  // Uniform double in [0, 1).
  double Uniform01() {
    return static_cast<double>(Next() >> 11) * 0x1.0p-53;
  }

  bool Bernoulli(double p) { return Uniform01() < p; }

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[UniformBelow(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// 64-bit FNV-1a.
std::uint64_t Fnv1a64(std::string_view bytes);

}  // namespace swarmsim

#endif  // SWARMSIM_RNG_H
