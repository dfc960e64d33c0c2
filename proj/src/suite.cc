#include "swarmsim/suite.h"

#include <atomic>
#include <mutex>
#include <set>
#include <thread>

#include "swarmsim/metrics.h"
#include "swarmsim/swarm.h"

namespace swarmsim {

std::vector<ScenarioSummary> RunSuite(const std::vector<ScenarioConfig>& configs,
                                      const SuiteOptions& options) {
  struct Job {
    std::size_t config;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  std::set<std::string> names;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    Validate(configs[i]);
    if (!names.insert(configs[i].name).second) {
      throw ConfigError("two configs share the scenario name " + configs[i].name);
    }
    for (std::uint64_t seed : options.seeds ? *options.seeds : configs[i].seeds) {
      jobs.push_back({i, seed});
    }
  }

  std::vector<std::optional<SimulationReport>> reports(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size() || failed.load()) return;
      const ScenarioConfig& config = configs[jobs[j].config];
      try {
        const RunRecord run = RunSwarm(config, jobs[j].seed);
        SimulationReport report = BuildReport(run);
        if (!options.out.empty()) {
          WriteRunOutputs(options.out / config.name / std::to_string(jobs[j].seed), run, report);
        }
        reports[j] = std::move(report);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::make_exception_ptr(SuiteError(config.name, jobs[j].seed, e.what()));
        failed = true;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int threads = std::max(1, std::min<int>(options.jobs, static_cast<int>(jobs.size())));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::vector<ScenarioSummary> summaries;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::vector<SimulationReport> runs;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      if (jobs[j].config == i) runs.push_back(std::move(*reports[j]));
    }
    summaries.push_back(Summarize(configs[i].name, std::move(runs)));
    if (!options.out.empty()) WriteEnvelopes(options.out / configs[i].name, summaries.back());
  }
  if (!options.out.empty()) WriteSuiteOutputs(options.out, summaries);
  return summaries;
}

}  // namespace swarmsim
