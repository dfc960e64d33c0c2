#ifndef SWARMSIM_METRICS_H
#define SWARMSIM_METRICS_H

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swarmsim/access_link.h"
#include "swarmsim/swarm.h"

namespace swarmsim {

// Right-continuous step function: value y[k] on [x[k], x[k+1]), |before|
// left of x[0].
struct StepFunction {
  std::vector<double> x;
  std::vector<double> y;
  double before = 0;

  double operator()(double at) const;
  bool operator==(const StepFunction&) const = default;
};

// Empirical CDF, F(v) = fraction of samples <= v. Throws
// std::invalid_argument on an empty sample set.
StepFunction ComputeCdf(std::span<const double> samples);

struct QueueStats {
  StepFunction ccdf;  // P(Q > bytes)
  double busy_fraction = 0;
  double mean_bytes = 0;
  double mean_ms = 0;
  std::size_t samples = 0;
};

// Statistics over post-dequeue occupancy samples taken at or before
// |until|. Throws std::invalid_argument if none qualify.
QueueStats ComputeQueueStats(std::span<const QueueSample> log, std::int64_t capacity_bps,
                             SimTime until = SimTime::max());

inline double QueueBytesToMs(double bytes, std::int64_t capacity_bps) {
  return bytes * 8.0 / static_cast<double>(capacity_bps) * 1e3;
}

struct ByteShare {
  double tcp_pct = 0;
  double utp_pct = 0;
};

// Percentages of |bytes| (indexed by Protocol). Throws on a zero total.
ByteShare ComputeByteShare(const std::array<std::uint64_t, 2>& bytes);

struct RegressionFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  std::size_t points = 0;
};

using Point = std::pair<double, double>;

// Ordinary least squares. Throws std::invalid_argument with fewer than two
// points or when every x is equal.
RegressionFit LinearFit(std::span<const Point> points);

// Fit over (TCP share, completion time) points with non-zero share only.
RegressionFit FitNonZeroShare(std::span<const Point> points);

// Spearman rank correlation with average ranks for ties.
double SpearmanRank(std::span<const Point> points);

struct Envelope {
  std::vector<double> x;
  std::vector<double> lo;
  std::vector<double> hi;
};

// Pointwise min/max on the union of the curves' breakpoints.
Envelope ComputeEnvelope(std::span<const StepFunction> curves);

struct ClassStats {
  std::string name;
  int disposition = 0;  // of the first member
  int peers = 0;
  double mean_t = 0;
  double sd_t = 0;
  double mean_queue_bytes = 0;
  double mean_queue_ms = 0;
  double busy_fraction = 0;
};

struct PeerCompletion {
  std::uint32_t id;
  std::string class_name;
  int disposition;
  double seconds;
};

struct SimulationReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::uint64_t config_digest = 0;
  int peers = 0;
  int leechers = 0;
  double end_time_s = 0;

  std::vector<PeerCompletion> completions;  // leechers only
  StepFunction completion_cdf;
  double mean_t = 0;
  double sd_t = 0;
  // Time by which 90% of leechers finished; the active phase is [0, t90].
  double t90 = 0;

  // Swarm means over every peer's uplink of the per-link post-dequeue
  // statistics.
  double mean_queue_bytes = 0;
  double mean_queue_ms = 0;
  double busy_fraction = 0;
  double busy_fraction_active = 0;
  double time_avg_queue_ms = 0;
  StepFunction queue_ccdf;  // pooled over all uplinks
  std::vector<QueueStats> per_link;

  ByteShare data_share;
  ByteShare wire_share;
  // Data carried over TCP between pairs that could have used uTP.
  std::uint64_t tcp_bytes_on_utp_pairs = 0;

  std::vector<ClassStats> classes;

  std::uint64_t dropped_packets = 0;
  std::uint64_t integrity_violations = 0;
  bool links_conserved = true;
};

SimulationReport BuildReport(const RunRecord& run);

}  // namespace swarmsim

#endif  // SWARMSIM_METRICS_H
