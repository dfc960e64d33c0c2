#include "swarmsim/report_io.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace swarmsim {
namespace {

namespace fs = std::filesystem;

class CsvFile {
 public:
  CsvFile(const fs::path& path, std::string_view header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << header << '\n';
  }
  ~CsvFile() { out_.flush(); }

  template <typename... Fields>
  void Row(const Fields&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << fields, first = false), ...);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

std::string Hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double MeanOf(const std::vector<SimulationReport>& runs, double SimulationReport::*field) {
  double sum = 0;
  for (const auto& r : runs) sum += r.*field;
  return runs.empty() ? 0.0 : sum / static_cast<double>(runs.size());
}

void WriteStep(const fs::path& path, std::string_view header, const StepFunction& f) {
  CsvFile csv(path, header);
  for (std::size_t i = 0; i < f.x.size(); ++i) csv.Row(Fixed(f.x[i]), Fixed(f.y[i]));
}

void WriteEnvelope(const fs::path& path, std::string_view header, const Envelope& e) {
  CsvFile csv(path, header);
  for (std::size_t i = 0; i < e.x.size(); ++i) csv.Row(Fixed(e.x[i]), Fixed(e.lo[i]), Fixed(e.hi[i]));
}

}  // namespace

std::string Fixed(double value, int decimals) {
  if (!std::isfinite(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  // Avoid "-0.000000".
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
  return s;
}

void WriteRunOutputs(const fs::path& dir, const RunRecord& run, const SimulationReport& r) {
  fs::create_directories(dir);
  {
    CsvFile csv(dir / "report.csv",
                "scenario,seed,config_digest,peers,leechers,mean_t_s,sd_t_s,t90_s,"
                "mean_queue_kb,mean_queue_ms,busy_fraction,busy_fraction_active,"
                "time_avg_queue_ms,tcp_share_pct,utp_share_pct,tcp_wire_pct,utp_wire_pct,"
                "tcp_bytes_on_utp_pairs,dropped_packets,integrity_violations,links_conserved,"
                "end_time_s");
    csv.Row(r.scenario, r.seed, Hex(r.config_digest), r.peers, r.leechers, Fixed(r.mean_t),
            Fixed(r.sd_t), Fixed(r.t90), Fixed(r.mean_queue_bytes / 1000.0),
            Fixed(r.mean_queue_ms), Fixed(r.busy_fraction), Fixed(r.busy_fraction_active),
            Fixed(r.time_avg_queue_ms), Fixed(r.data_share.tcp_pct), Fixed(r.data_share.utp_pct),
            Fixed(r.wire_share.tcp_pct), Fixed(r.wire_share.utp_pct), r.tcp_bytes_on_utp_pairs,
            r.dropped_packets, r.integrity_violations, r.links_conserved ? 1 : 0,
            Fixed(r.end_time_s));
  }
  {
    CsvFile csv(dir / "completion.csv", "peer_id,class,disposition,completion_s");
    for (const auto& c : r.completions) csv.Row(c.id, c.class_name, c.disposition, Fixed(c.seconds));
  }
  {
    CsvFile csv(dir / "classes.csv",
                "class,disposition,peers,mean_t_s,sd_t_s,mean_queue_kb,mean_queue_ms,busy_fraction");
    for (const auto& c : r.classes) {
      csv.Row(c.name, c.disposition, c.peers, Fixed(c.mean_t), Fixed(c.sd_t),
              Fixed(c.mean_queue_bytes / 1000.0), Fixed(c.mean_queue_ms), Fixed(c.busy_fraction));
    }
  }
  {
    // A single run contributes one point to the cross-scenario regression.
    CsvFile csv(dir / "regression.csv", "tcp_share_pct,mean_t_s,mean_queue_kb,mean_queue_ms");
    csv.Row(Fixed(r.data_share.tcp_pct), Fixed(r.mean_t), Fixed(r.mean_queue_bytes / 1000.0),
            Fixed(r.mean_queue_ms));
  }
  WriteStep(dir / "cdf.csv", "completion_s,cdf", r.completion_cdf);
  WriteStep(dir / "ccdf.csv", "queue_bytes,ccdf", r.queue_ccdf);
  for (const PeerRecord& p : run.peers) {
    CsvFile csv(dir / ("queue_" + std::to_string(p.id) + ".csv"), "time_s,bytes,pkts");
    for (const QueueSample& s : p.dequeue_log) csv.Row(Fixed(ToSeconds(s.time)), s.bytes, s.packets);
  }
}

ScenarioSummary Summarize(std::string scenario, std::vector<SimulationReport> runs) {
  if (runs.empty()) throw std::invalid_argument("summary of no runs");
  for (const auto& r : runs) {
    if (r.config_digest != runs.front().config_digest) {
      throw std::invalid_argument("replications of " + scenario + " come from different configs");
    }
  }
  ScenarioSummary s;
  s.scenario = std::move(scenario);
  double share = 0;
  for (const auto& r : runs) share += r.data_share.tcp_pct;
  s.tcp_share = share / static_cast<double>(runs.size());
  s.mean_t = MeanOf(runs, &SimulationReport::mean_t);
  s.mean_queue_bytes = MeanOf(runs, &SimulationReport::mean_queue_bytes);
  s.mean_queue_ms = MeanOf(runs, &SimulationReport::mean_queue_ms);
  double ss = 0;
  for (const auto& r : runs) ss += (r.mean_t - s.mean_t) * (r.mean_t - s.mean_t);
  s.sd_mean_t = std::sqrt(ss / static_cast<double>(runs.size()));
  s.runs = std::move(runs);
  return s;
}

void WriteEnvelopes(const fs::path& dir, const ScenarioSummary& summary) {
  fs::create_directories(dir);
  std::vector<StepFunction> cdfs, ccdfs;
  for (const auto& r : summary.runs) {
    cdfs.push_back(r.completion_cdf);
    ccdfs.push_back(r.queue_ccdf);
  }
  WriteEnvelope(dir / "envelope_cdf.csv", "completion_s,cdf_min,cdf_max", ComputeEnvelope(cdfs));
  WriteEnvelope(dir / "envelope_ccdf.csv", "queue_bytes,ccdf_min,ccdf_max", ComputeEnvelope(ccdfs));
}

void WriteSuiteOutputs(const fs::path& dir, const std::vector<ScenarioSummary>& scenarios) {
  fs::create_directories(dir);
  std::vector<Point> by_share, by_queue, queue_vs_share;
  {
    CsvFile csv(dir / "suite.csv",
                "scenario,runs,tcp_share_pct,mean_t_s,sd_mean_t_s,mean_queue_kb,mean_queue_ms");
    for (const auto& s : scenarios) {
      csv.Row(s.scenario, s.runs.size(), Fixed(s.tcp_share), Fixed(s.mean_t), Fixed(s.sd_mean_t),
              Fixed(s.mean_queue_bytes / 1000.0), Fixed(s.mean_queue_ms));
      by_share.emplace_back(s.tcp_share, s.mean_t);
      queue_vs_share.emplace_back(s.tcp_share, s.mean_queue_bytes);
      if (s.tcp_share > 0) by_queue.emplace_back(s.mean_queue_bytes / 1000.0, s.mean_t);
    }
  }
  CsvFile csv(dir / "regression.csv", "model,points,slope,intercept,r_squared,spearman");
  auto emit = [&](const char* model, const std::vector<Point>& points, bool non_zero) {
    try {
      const RegressionFit f = non_zero ? FitNonZeroShare(points) : LinearFit(points);
      csv.Row(model, f.points, Fixed(f.slope), Fixed(f.intercept), Fixed(f.r_squared), "nan");
    } catch (const std::invalid_argument&) {
      csv.Row(model, 0, "nan", "nan", "nan", "nan");
    }
  };
  emit("t_vs_tcp_share", by_share, true);
  emit("t_vs_queue_kb", by_queue, false);
  if (queue_vs_share.size() >= 2) {
    csv.Row("queue_vs_tcp_share", queue_vs_share.size(), "nan", "nan", "nan",
            Fixed(SpearmanRank(queue_vs_share)));
  }
}

}  // namespace swarmsim
