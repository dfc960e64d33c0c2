#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "swarmsim/metrics.h"
#include "swarmsim/rng.h"
#include "swarmsim/swarm.h"

using namespace swarmsim;

TEST_CASE("cdf of a single sample") {
  const std::vector<double> s{5};
  const StepFunction f = ComputeCdf(s);
  CHECK(f(4.999) == 0.0);
  CHECK(f(5) == 1.0);
  CHECK(f(100) == 1.0);
}

TEST_CASE("cdf at a midpoint and with ties") {
  const std::vector<double> s{4, 1, 3, 2};
  CHECK(ComputeCdf(s)(2.5) == 0.5);
  const std::vector<double> tied{1, 2, 2, 3};
  const StepFunction f = ComputeCdf(tied);
  CHECK(f(2) == 0.75);
  CHECK(f.x.size() == 3);
  CHECK_THROWS_AS(ComputeCdf(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("cdf matches counting on random samples") {
  RngStream rng(21);
  std::vector<double> s;
  for (int i = 0; i < 1000; ++i) s.push_back(std::floor(rng.Uniform01() * 200) / 2);
  const StepFunction f = ComputeCdf(s);
  CHECK(std::is_sorted(f.y.begin(), f.y.end()));
  for (int probe = 0; probe < 300; ++probe) {
    const double v = rng.Uniform01() * 110 - 5;
    const double count = static_cast<double>(std::count_if(s.begin(), s.end(), [&](double x) { return x <= v; }));
    CHECK(f(v) == doctest::Approx(count / 1000.0).epsilon(1e-12));
  }
}

TEST_CASE("queue statistics over a short log") {
  const std::vector<QueueSample> log{{1ms, 0, 0}, {2ms, 0, 0}, {3ms, 1500, 1}, {4ms, 1500, 1}};
  const QueueStats q = ComputeQueueStats(log, 1'000'000);
  CHECK(q.busy_fraction == 0.5);
  CHECK(q.mean_bytes == 750.0);
  CHECK(q.mean_ms == doctest::Approx(6.0));
  CHECK(q.ccdf(-1) == 1.0);
  CHECK(q.ccdf(0) == 0.5);
  CHECK(q.ccdf(1499) == 0.5);
  CHECK(q.ccdf(1500) == 0.0);
  const QueueStats early = ComputeQueueStats(log, 1'000'000, 2ms);
  CHECK(early.samples == 2);
  CHECK(early.busy_fraction == 0.0);
  CHECK_THROWS_AS(ComputeQueueStats(std::vector<QueueSample>{}, 1'000'000), std::invalid_argument);
}

TEST_CASE("queue bytes to delay") {
  CHECK(QueueBytesToMs(50'000, 1'000'000) == doctest::Approx(400.0));
  CHECK(QueueBytesToMs(125'000, 1'000'000) == doctest::Approx(1000.0));
}

TEST_CASE("byte shares") {
  const ByteShare s = ComputeByteShare({300, 100});  // {tcp, utp}
  CHECK(s.tcp_pct == doctest::Approx(75.0));
  CHECK(s.utp_pct == doctest::Approx(25.0));
  CHECK(ComputeByteShare({0, 7}).tcp_pct == 0.0);
  CHECK_THROWS_AS(ComputeByteShare({0, 0}), std::invalid_argument);
}

TEST_CASE("least squares recovers an exact line") {
  std::vector<Point> pts;
  for (double x : {0.0, 1.5, 2.0, 7.0, 11.0}) pts.emplace_back(x, 3 * x + 5);
  const RegressionFit f = LinearFit(pts);
  CHECK(std::abs(f.slope - 3) < 1e-9);
  CHECK(std::abs(f.intercept - 5) < 1e-9);
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(f.points == 5);
}

TEST_CASE("least squares on noisy data matches the normal equations") {
  RngStream rng(8);
  std::vector<Point> pts;
  for (int i = 0; i < 50; ++i) {
    const double x = rng.Uniform01() * 100;
    pts.emplace_back(x, -0.5 * x + 20 + (rng.Uniform01() - 0.5) * 10);
  }
  // Normal equations solved directly.
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  const RegressionFit f = LinearFit(pts);
  CHECK(f.slope == doctest::Approx(slope).epsilon(1e-9));
  CHECK(f.intercept == doctest::Approx(intercept).epsilon(1e-9));
  CHECK(f.r_squared > 0.9);
  CHECK(f.r_squared <= 1.0);
}

TEST_CASE("degenerate fits throw") {
  CHECK_THROWS_AS(LinearFit(std::vector<Point>{{1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(LinearFit(std::vector<Point>{{1, 2}, {1, 3}, {1, 4}}), std::invalid_argument);
  // Only one point survives the zero-share filter.
  CHECK_THROWS_AS(FitNonZeroShare(std::vector<Point>{{0, 2}, {0, 3}, {10, 4}}), std::invalid_argument);
}

TEST_CASE("zero-share points are excluded from the share fit") {
  const std::vector<Point> pts{{0, 1000}, {10, 100}, {20, 110}, {30, 120}};
  const RegressionFit f = FitNonZeroShare(pts);
  CHECK(f.points == 3);
  CHECK(f.slope == doctest::Approx(1.0));
  CHECK(f.intercept == doctest::Approx(90.0));
}

TEST_CASE("spearman rank correlation") {
  CHECK(SpearmanRank(std::vector<Point>{{1, 1}, {2, 8}, {3, 27}, {4, 64}}) == doctest::Approx(1.0));
  CHECK(SpearmanRank(std::vector<Point>{{1, 4}, {2, 3}, {3, 2}, {4, 1}}) == doctest::Approx(-1.0));
  // Average ranks for the tie: x ranks {1, 2.5, 2.5, 4}.
  CHECK(SpearmanRank(std::vector<Point>{{1, 1}, {2, 2}, {2, 3}, {3, 4}}) ==
        doctest::Approx(4.5 / std::sqrt(22.5)));
}

TEST_CASE("envelope bounds every curve on the merged grid") {
  RngStream rng(13);
  std::vector<StepFunction> curves;
  for (int c = 0; c < 4; ++c) {
    std::vector<double> s;
    for (int i = 0; i < 30; ++i) s.push_back(rng.Uniform01() * 10);
    curves.push_back(ComputeCdf(s));
  }
  const Envelope e = ComputeEnvelope(curves);
  CHECK(std::is_sorted(e.x.begin(), e.x.end()));
  CHECK(e.x.size() == 120);
  for (std::size_t i = 0; i < e.x.size(); ++i) {
    CHECK(e.lo[i] <= e.hi[i]);
    double lo = 2, hi = -1;
    for (const auto& c : curves) {
      lo = std::min(lo, c(e.x[i]));
      hi = std::max(hi, c(e.x[i]));
    }
    CHECK(e.lo[i] == lo);
    CHECK(e.hi[i] == hi);
  }
  const Envelope single = ComputeEnvelope(std::span(curves).first(1));
  CHECK(single.lo == single.hi);
  CHECK(single.lo == curves[0].y);
}

namespace {

PeerRecord Leecher(std::uint32_t id, std::string cls, int disp, double t, std::uint32_t q) {
  PeerRecord p;
  p.id = id;
  p.class_name = std::move(cls);
  p.disposition = disp;
  p.uplink_bps = 1'000'000;
  p.completion = SimTime{static_cast<std::int64_t>(t * 1e6)};
  p.dequeue_log = {{1s, q, 1}, {2s, 0, 0}};
  return p;
}

}  // namespace

TEST_CASE("report aggregates per class and over the swarm") {
  RunRecord run;
  run.scenario = "synthetic";
  run.end_time = 100s;
  PeerRecord seed;
  seed.initial_seed = true;
  seed.class_name = "seed";
  seed.uplink_bps = 1'000'000;
  seed.dequeue_log = {{1s, 0, 0}};
  run.peers.push_back(seed);
  run.peers.push_back(Leecher(1, "tcp", 13, 10, 2000));
  run.peers.push_back(Leecher(2, "tcp", 13, 20, 4000));
  run.peers.push_back(Leecher(3, "utp", 14, 30, 0));
  run.data_bytes = {100, 300};
  run.wire_bytes = {120, 330};
  run.connections.push_back({1, 2, Protocol::kTcp, false, 50});
  run.connections.push_back({1, 3, Protocol::kTcp, true, 40});
  run.connections.push_back({2, 3, Protocol::kUtp, true, 70});

  const SimulationReport r = BuildReport(run);
  CHECK(r.leechers == 3);
  CHECK(r.mean_t == doctest::Approx(20.0));
  CHECK(r.sd_t == doctest::Approx(std::sqrt(200.0 / 3)));
  CHECK(r.t90 == doctest::Approx(30.0));
  CHECK(r.data_share.tcp_pct == doctest::Approx(25.0));
  CHECK(r.tcp_bytes_on_utp_pairs == 40);
  // Links: seed 0, 1000, 2000, 0 bytes mean occupancy.
  CHECK(r.mean_queue_bytes == doctest::Approx(750.0));
  CHECK(r.mean_queue_ms == doctest::Approx(6.0));
  REQUIRE(r.classes.size() == 2);
  CHECK(r.classes[0].name == "tcp");
  CHECK(r.classes[0].disposition == 13);
  CHECK(r.classes[0].peers == 2);
  CHECK(r.classes[0].mean_t == doctest::Approx(15.0));
  CHECK(r.classes[0].mean_queue_bytes == doctest::Approx(1500.0));
  CHECK(r.classes[1].mean_t == doctest::Approx(30.0));
  CHECK(r.classes[1].busy_fraction == 0.0);

  run.peers[2].completion.reset();
  CHECK_THROWS_AS(BuildReport(run), std::invalid_argument);
}
