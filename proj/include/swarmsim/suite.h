#ifndef SWARMSIM_SUITE_H
#define SWARMSIM_SUITE_H

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmsim/config.h"
#include "swarmsim/report_io.h"

namespace swarmsim {

struct SuiteOptions {
  // Output root; runs land in <out>/<scenario>/<seed>/. Empty: no files.
  std::filesystem::path out;
  // Overrides every config's own seed list when set.
  std::optional<std::vector<std::uint64_t>> seeds;
  int jobs = 1;
};

// A replication failed. Runs that finished before it keep their files.
class SuiteError : public std::runtime_error {
 public:
  SuiteError(std::string scenario, std::uint64_t seed, const std::string& what)
      : std::runtime_error(scenario + " seed " + std::to_string(seed) + ": " + what),
        scenario_(std::move(scenario)),
        seed_(seed) {}
  const std::string& scenario() const { return scenario_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::string scenario_;
  std::uint64_t seed_;
};

// Runs every (config, seed) pair, in parallel across |jobs| threads, and
// summarizes each config. With an output root it also writes envelopes per
// scenario and the suite-level regression.
std::vector<ScenarioSummary> RunSuite(const std::vector<ScenarioConfig>& configs,
                                      const SuiteOptions& options);

}  // namespace swarmsim

#endif  // SWARMSIM_SUITE_H
