#ifndef SWARMSIM_REPORT_IO_H
#define SWARMSIM_REPORT_IO_H

#include <filesystem>
#include <string>
#include <vector>

#include "swarmsim/metrics.h"
#include "swarmsim/swarm.h"

namespace swarmsim {

// Writes report.csv, completion.csv, classes.csv, cdf.csv, ccdf.csv,
// regression.csv and one queue_<peer>.csv per uplink into |dir|.
void WriteRunOutputs(const std::filesystem::path& dir, const RunRecord& run,
                     const SimulationReport& report);

// Aggregate of one scenario's replications.
struct ScenarioSummary {
  std::string scenario;
  std::vector<SimulationReport> runs;
  double tcp_share = 0;         // mean over runs
  double mean_t = 0;            // mean of per-run E[T]
  double sd_mean_t = 0;         // spread of per-run E[T] across seeds
  double mean_queue_bytes = 0;  // mean of swarm E[Q]
  double mean_queue_ms = 0;
};

ScenarioSummary Summarize(std::string scenario, std::vector<SimulationReport> runs);

// Envelopes of the completion-time CDF and the queue CCDF across the
// scenario's replications.
void WriteEnvelopes(const std::filesystem::path& dir, const ScenarioSummary& summary);

// suite.csv with one row per scenario and regression.csv with the fits of
// E[T] against TCP share and against mean queue size over non-zero-share
// scenarios.
void WriteSuiteOutputs(const std::filesystem::path& dir,
                       const std::vector<ScenarioSummary>& scenarios);

// Fixed-point decimal, never scientific notation.
std::string Fixed(double value, int decimals = 6);

}  // namespace swarmsim

#endif  // SWARMSIM_REPORT_IO_H
