// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any
// fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "swarmsim/disposition.h"
#include "swarmsim/metrics.h"
#include "swarmsim/presets.h"
#include "swarmsim/report_io.h"
#include "swarmsim/swarm.h"
#include "swarmsim/testbed.h"

using namespace swarmsim;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void Report(int n, bool pass, const std::string& detail) {
  std::printf("criterion %2d %s  %s\n", n, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

double WallSeconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

bool all_links_conserved = true;

// Runs of one desk scenario over its seeds.
struct Scenario {
  ScenarioConfig config;
  std::vector<RunRecord> runs;
  std::vector<SimulationReport> reports;

  double Mean(double SimulationReport::*field) const {
    double s = 0;
    for (const auto& r : reports) s += r.*field;
    return s / static_cast<double>(reports.size());
  }
  double MeanTcpShare() const {
    double s = 0;
    for (const auto& r : reports) s += r.data_share.tcp_pct;
    return s / static_cast<double>(reports.size());
  }
};

Scenario RunScenario(const std::string& preset) {
  Scenario s;
  s.config = *FindPreset(preset);
  for (std::uint64_t seed : s.config.seeds) {
    s.runs.push_back(RunSwarm(s.config, seed));
    s.reports.push_back(BuildReport(s.runs.back()));
    all_links_conserved = all_links_conserved && s.reports.back().links_conserved;
  }
  return s;
}

std::string Num(double v, int decimals = 1) { return Fixed(v, decimals); }

void SingleFlowTarget() {
  const auto start = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  for (SimTime target : {100ms, 25ms}) {
    BottleneckSpec spec;
    spec.capacity_bps = 5'000'000;
    spec.buffer_seconds = 5.0;
    spec.duration = 60s;
    const BulkFlowSpec flow{Protocol::kUtp, target, kZeroTime};
    const BottleneckOutcome out = RunBottleneck(spec, std::span(&flow, 1));
    const double want = ToMilliseconds(target);
    const double got = out.flows[0].mean_estimated_queuing_delay_ms;
    pass = pass && std::abs(got - want) <= 0.2 * want && out.utilization >= 0.95 && out.conserved;
    all_links_conserved = all_links_conserved && out.conserved;
    detail += "target " + Num(want, 0) + " ms: delay " + Num(got) + " ms, util " +
              Num(100 * out.utilization) + "%; ";
  }
  const double wall = WallSeconds(start);
  Report(1, pass && wall < 2.0, detail + "wall " + Num(wall, 2) + " s");
}

void LowPriority() {
  const auto start = std::chrono::steady_clock::now();
  BottleneckSpec spec;
  spec.capacity_bps = 5'000'000;
  spec.duration = 120s;
  const BulkFlowSpec tcp_alone{Protocol::kTcp, 100ms, kZeroTime};
  const BottleneckOutcome baseline = RunBottleneck(spec, std::span(&tcp_alone, 1));
  const BulkFlowSpec both[] = {{Protocol::kTcp, 100ms, kZeroTime},
                               {Protocol::kUtp, 100ms, kZeroTime}};
  const BottleneckOutcome shared = RunBottleneck(spec, both);
  const double tcp = static_cast<double>(shared.flows[0].delivered_bytes);
  const double utp = static_cast<double>(shared.flows[1].delivered_bytes);
  const double share = 100 * utp / (tcp + utp);
  const bool pass = share < 10 && shared.utilization >= baseline.utilization - 0.02;
  all_links_conserved = all_links_conserved && shared.conserved && baseline.conserved;
  const double wall = WallSeconds(start);
  Report(2, pass && wall < 2.0,
         "LEDBAT share " + Num(share, 2) + "%, util " + Num(100 * shared.utilization) +
             "% vs TCP alone " + Num(100 * baseline.utilization) + "%, wall " + Num(wall, 2) + " s");
}

std::vector<std::uint8_t> ReadAll(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Writes every run of |scenarios| under |root| and returns file -> bytes.
std::map<std::string, std::vector<std::uint8_t>> Snapshot(const fs::path& root,
                                                          const std::vector<Scenario>& scenarios) {
  std::map<std::string, std::vector<std::uint8_t>> files;
  for (const Scenario& s : scenarios) {
    for (std::size_t i = 0; i < s.runs.size(); ++i) {
      WriteRunOutputs(root / s.config.name / std::to_string(s.runs[i].seed), s.runs[i], s.reports[i]);
    }
  }
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) files[fs::relative(entry.path(), root).string()] = ReadAll(entry.path());
  }
  return files;
}

}  // namespace

int main() {
  SingleFlowTarget();
  LowPriority();

  const Scenario d31 = RunScenario("desk-homog-default");
  const Scenario d10 = RunScenario("desk-homog-utp");
  const Scenario d5 = RunScenario("desk-homog-tcp");
  const std::vector<std::pair<int, Scenario>> het = {
      {75, RunScenario("desk-heter-75-25")},
      {50, RunScenario("desk-heter-50-50")},
      {25, RunScenario("desk-heter-25-75")}};

  {
    const double t31 = d31.Mean(&SimulationReport::mean_t);
    const double t10 = d10.Mean(&SimulationReport::mean_t);
    const double t5 = d5.Mean(&SimulationReport::mean_t);
    const double gap = (t5 - t31) / t5;
    Report(3, t31 < t10 && t10 < t5 && gap >= 0.05,
           "E[T] 31=" + Num(t31) + " s, 10=" + Num(t10) + " s, 5=" + Num(t5) + " s, 31-vs-5 gap " +
               Num(100 * gap) + "%");
  }

  {
    bool pass = true;
    std::string tcp_q, utp_q;
    for (const auto& r : d5.reports) {
      pass = pass && r.mean_queue_ms >= 300;
      tcp_q += " " + Num(r.mean_queue_ms);
    }
    for (const auto& r : d10.reports) {
      pass = pass && r.mean_queue_ms <= 150;
      utp_q += " " + Num(r.mean_queue_ms);
    }
    Report(4, pass, "all-TCP queue ms:" + tcp_q + "; all-uTP queue ms:" + utp_q);
  }

  {
    bool pass = true;
    std::string detail;
    for (const Scenario* s : {&d31, &d10, &d5}) {
      detail += s->config.name + ":";
      for (const auto& r : s->reports) {
        pass = pass && r.busy_fraction_active >= 0.6 && r.busy_fraction_active <= 0.95;
        detail += " " + Num(r.busy_fraction_active, 3);
      }
      detail += "; ";
    }
    Report(5, pass, detail);
  }

  {
    bool pass = true;
    std::string detail = "uTP byte share %:";
    for (const auto& r : d31.reports) {
      pass = pass && r.data_share.utp_pct >= 60;
      detail += " " + Num(r.data_share.utp_pct);
    }
    Report(6, pass, detail);
  }

  {
    bool pass = true;
    std::string detail;
    for (const auto& [pct, s] : het) {
      const double peers = 100.0 * s.config.classes[0].size() / s.config.leecher_count();
      const double bytes = s.MeanTcpShare();
      pass = pass && std::abs(bytes - peers) <= 15;
      detail += std::to_string(pct) + "/" + std::to_string(100 - pct) + ": bytes " + Num(bytes) +
                "% vs peers " + Num(peers) + "%; ";
    }
    Report(7, pass, detail);
  }

  {
    bool pass = true;
    std::string detail;
    for (const auto& [pct, s] : het) {
      double gap = 0;
      for (const auto& r : s.reports) {
        gap += std::abs(r.classes[0].mean_t - r.classes[1].mean_t) / r.mean_t;
      }
      gap /= static_cast<double>(s.reports.size());
      pass = pass && gap <= 0.10;
      detail += std::to_string(pct) + "/" + std::to_string(100 - pct) + ": " + Num(gap, 3) + "; ";
    }
    Report(8, pass, detail);
  }

  {
    std::vector<const Scenario*> all = {&d31, &d10, &d5};
    for (const auto& h : het) all.push_back(&h.second);
    std::vector<Point> share_t, share_q;
    for (const Scenario* s : all) {
      share_t.emplace_back(s->MeanTcpShare(), s->Mean(&SimulationReport::mean_t));
      share_q.emplace_back(s->MeanTcpShare(), s->Mean(&SimulationReport::mean_queue_bytes));
    }
    const RegressionFit fit = FitNonZeroShare(share_t);
    const double rho = SpearmanRank(share_q);
    Report(9, fit.points == 5 && fit.slope > 0 && rho >= 0.8,
           "slope " + Num(fit.slope, 4) + " s/pp over " + std::to_string(fit.points) +
               " scenarios, Spearman(queue, share) " + Num(rho, 3));
  }

  {
    int mismatches = 0;
    for (int a = 0; a < 32; ++a) {
      for (int b = 0; b < 32; ++b) {
        const bool utp = ((a & 2) && (b & 8)) || ((b & 2) && (a & 8));
        const bool tcp = ((a & 1) && (b & 4)) || ((b & 1) && (a & 4));
        const std::optional<Protocol> want =
            utp ? std::optional(Protocol::kUtp) : tcp ? std::optional(Protocol::kTcp) : std::nullopt;
        mismatches += NegotiateConnection(TransportDisposition(a), TransportDisposition(b)) != want;
      }
    }
    const bool case1 = NegotiateConnection(TransportDisposition(13), TransportDisposition(14)) == Protocol::kUtp;
    const bool case2 = NegotiateConnection(TransportDisposition(5), TransportDisposition(31)) == Protocol::kTcp;
    Report(10, mismatches == 0 && case1 && case2,
           std::to_string(mismatches) + " mismatches of 1024; (13,14)->" + (case1 ? "uTP" : "?") +
               ", (5,31)->" + (case2 ? "TCP" : "?"));
  }

  {
    const fs::path base = fs::temp_directory_path() / "swarmsim_acceptance";
    fs::remove_all(base);
    std::vector<Scenario> first = {d31, d10, d5};
    for (const auto& h : het) first.push_back(h.second);
    std::vector<Scenario> second;
    for (const Scenario& s : first) second.push_back(RunScenario(s.config.name));
    const auto a = Snapshot(base / "a", first);
    const auto b = Snapshot(base / "b", second);
    fs::remove_all(base);
    Report(11, a == b && all_links_conserved,
           std::to_string(a.size()) + " CSV files " + (a == b ? "identical" : "differ") +
               " across reruns; links " + (all_links_conserved ? "conserve" : "VIOLATE") +
               " served+dropped+queued=enqueued");
  }

  return failures == 0 ? 0 : 1;
}
