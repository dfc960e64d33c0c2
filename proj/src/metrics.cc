#include "swarmsim/metrics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace swarmsim {
namespace {

double Mean(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Population standard deviation.
double StdDev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

std::vector<double> Ranks(std::vector<double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> rank(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double StepFunction::operator()(double at) const {
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  if (it == x.begin()) return before;
  return y[static_cast<std::size_t>(it - x.begin()) - 1];
}

StepFunction ComputeCdf(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("CDF of an empty sample set");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  StepFunction f;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    f.x.push_back(sorted[i]);
    f.y.push_back(static_cast<double>(i + 1) / n);
  }
  return f;
}

QueueStats ComputeQueueStats(std::span<const QueueSample> log, std::int64_t capacity_bps,
                             SimTime until) {
  std::map<std::uint32_t, std::size_t> histogram;
  double sum = 0;
  std::size_t busy = 0, n = 0;
  for (const QueueSample& s : log) {
    if (s.time > until) break;
    ++histogram[s.bytes];
    sum += s.bytes;
    busy += s.bytes > 0;
    ++n;
  }
  if (n == 0) throw std::invalid_argument("queue statistics of an empty dequeue log");
  QueueStats q;
  q.samples = n;
  q.mean_bytes = sum / static_cast<double>(n);
  q.mean_ms = QueueBytesToMs(q.mean_bytes, capacity_bps);
  q.busy_fraction = static_cast<double>(busy) / static_cast<double>(n);
  q.ccdf.before = 1.0;
  std::size_t at_or_below = 0;
  for (const auto& [bytes, count] : histogram) {
    at_or_below += count;
    q.ccdf.x.push_back(bytes);
    q.ccdf.y.push_back(static_cast<double>(n - at_or_below) / static_cast<double>(n));
  }
  return q;
}

ByteShare ComputeByteShare(const std::array<std::uint64_t, 2>& bytes) {
  const double tcp = static_cast<double>(bytes[static_cast<std::size_t>(Protocol::kTcp)]);
  const double utp = static_cast<double>(bytes[static_cast<std::size_t>(Protocol::kUtp)]);
  if (tcp + utp <= 0) throw std::invalid_argument("byte share of a run that moved no data");
  return {100.0 * tcp / (tcp + utp), 100.0 * utp / (tcp + utp)};
}

RegressionFit LinearFit(std::span<const Point> points) {
  if (points.size() < 2) throw std::invalid_argument("linear fit needs at least two points");
  const double n = static_cast<double>(points.size());
  double mx = 0, my = 0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0) throw std::invalid_argument("linear fit over points sharing one x value");
  RegressionFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  fit.points = points.size();
  return fit;
}

RegressionFit FitNonZeroShare(std::span<const Point> points) {
  std::vector<Point> kept;
  for (const Point& p : points) {
    if (p.first > 0) kept.push_back(p);
  }
  return LinearFit(kept);
}

double SpearmanRank(std::span<const Point> points) {
  if (points.size() < 2) throw std::invalid_argument("rank correlation needs at least two points");
  std::vector<double> xs, ys;
  for (const auto& [x, y] : points) {
    xs.push_back(x);
    ys.push_back(y);
  }
  const auto rx = Ranks(xs);
  const auto ry = Ranks(ys);
  // Pearson on ranks handles ties correctly.
  const double mx = Mean(rx), my = Mean(ry);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

Envelope ComputeEnvelope(std::span<const StepFunction> curves) {
  if (curves.empty()) throw std::invalid_argument("envelope of no curves");
  std::vector<double> grid;
  for (const auto& c : curves) grid.insert(grid.end(), c.x.begin(), c.x.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  Envelope e;
  e.x = grid;
  for (double at : grid) {
    double lo = curves[0](at), hi = lo;
    for (const auto& c : curves) {
      lo = std::min(lo, c(at));
      hi = std::max(hi, c(at));
    }
    e.lo.push_back(lo);
    e.hi.push_back(hi);
  }
  return e;
}

SimulationReport BuildReport(const RunRecord& run) {
  SimulationReport r;
  r.scenario = run.scenario;
  r.seed = run.seed;
  r.config_digest = run.config_digest;
  r.peers = static_cast<int>(run.peers.size());
  r.end_time_s = ToSeconds(run.end_time);

  std::vector<double> times;
  std::vector<SimTime> exact;
  for (const PeerRecord& p : run.peers) {
    if (p.initial_seed) continue;
    if (!p.completion) throw std::invalid_argument("report over a run with incomplete leechers");
    r.completions.push_back({p.id, p.class_name, p.disposition, ToSeconds(*p.completion)});
    times.push_back(ToSeconds(*p.completion));
    exact.push_back(*p.completion);
  }
  r.leechers = static_cast<int>(times.size());
  r.completion_cdf = ComputeCdf(times);
  r.mean_t = Mean(times);
  r.sd_t = StdDev(times);
  std::sort(exact.begin(), exact.end());
  const auto k = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(exact.size())));
  const SimTime active_end = exact[std::max<std::size_t>(k, 1) - 1];
  r.t90 = ToSeconds(active_end);

  std::map<std::uint32_t, std::size_t> pooled;
  std::size_t pooled_n = 0;
  std::size_t active_busy = 0, active_n = 0;
  double time_avg_ms = 0;
  for (const PeerRecord& p : run.peers) {
    // A peer that never sent anything has an idle, empty queue.
    QueueStats q;
    if (!p.dequeue_log.empty()) q = ComputeQueueStats(p.dequeue_log, p.uplink_bps);
    for (const QueueSample& s : p.dequeue_log) {
      ++pooled[s.bytes];
      ++pooled_n;
      if (s.time <= active_end) {
        ++active_n;
        active_busy += s.bytes > 0;
      }
    }
    r.mean_queue_bytes += q.mean_bytes;
    r.mean_queue_ms += q.mean_ms;
    r.busy_fraction += q.busy_fraction;
    if (run.end_time > kZeroTime) {
      time_avg_ms += QueueBytesToMs(p.occupancy_integral / static_cast<double>(run.end_time.count()),
                                    p.uplink_bps);
    }
    r.dropped_packets += p.link.dropped_packets;
    r.links_conserved = r.links_conserved && p.link_conserved;
    r.per_link.push_back(std::move(q));
  }
  const double links = static_cast<double>(run.peers.size());
  r.mean_queue_bytes /= links;
  r.mean_queue_ms /= links;
  r.busy_fraction /= links;
  r.time_avg_queue_ms = time_avg_ms / links;
  r.busy_fraction_active =
      active_n ? static_cast<double>(active_busy) / static_cast<double>(active_n) : 0.0;
  r.queue_ccdf.before = 1.0;
  std::size_t below = 0;
  for (const auto& [bytes, count] : pooled) {
    below += count;
    r.queue_ccdf.x.push_back(bytes);
    r.queue_ccdf.y.push_back(static_cast<double>(pooled_n - below) / static_cast<double>(pooled_n));
  }

  r.data_share = ComputeByteShare(run.data_bytes);
  r.wire_share = ComputeByteShare(run.wire_bytes);
  for (const ConnectionRecord& c : run.connections) {
    if (c.protocol == Protocol::kTcp && c.utp_feasible) r.tcp_bytes_on_utp_pairs += c.data_bytes;
  }

  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < run.peers.size(); ++i) {
    const PeerRecord& p = run.peers[i];
    if (p.initial_seed) continue;
    if (!members.count(p.class_name)) order.push_back(p.class_name);
    members[p.class_name].push_back(i);
  }
  for (const std::string& name : order) {
    ClassStats cs;
    cs.name = name;
    std::vector<double> ts;
    for (std::size_t i : members[name]) {
      const PeerRecord& p = run.peers[i];
      if (ts.empty()) cs.disposition = p.disposition;
      ts.push_back(ToSeconds(*p.completion));
      cs.mean_queue_bytes += r.per_link[i].mean_bytes;
      cs.mean_queue_ms += r.per_link[i].mean_ms;
      cs.busy_fraction += r.per_link[i].busy_fraction;
    }
    cs.peers = static_cast<int>(ts.size());
    cs.mean_t = Mean(ts);
    cs.sd_t = StdDev(ts);
    cs.mean_queue_bytes /= cs.peers;
    cs.mean_queue_ms /= cs.peers;
    cs.busy_fraction /= cs.peers;
    r.classes.push_back(std::move(cs));
  }

  r.integrity_violations = run.integrity_violations;
  return r;
}

}  // namespace swarmsim
