// Command-line driver: single runs, replicated suites and the preset library.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <thread>

#include "swarmsim/config.h"
#include "swarmsim/metrics.h"
#include "swarmsim/presets.h"
#include "swarmsim/suite.h"
#include "swarmsim/swarm.h"

namespace {

using namespace swarmsim;
namespace fs = std::filesystem;

int Fail(std::string_view kind, const std::string& message, nlohmann::json extra = {}) {
  nlohmann::json err = {{"error", kind}, {"message", message}};
  if (extra.is_object()) err.update(extra);
  std::cerr << err.dump() << '\n';
  return kind == "usage" ? 2 : 1;
}

// A config argument is a file path, or a preset name when no such file
// exists.
ScenarioConfig Resolve(const std::string& arg) {
  if (fs::exists(arg)) return LoadConfig(arg);
  if (auto preset = FindPreset(arg)) return *preset;
  throw ConfigError("no config file or preset named '" + arg + "'");
}

std::vector<std::uint64_t> ParseSeeds(const std::string& list) {
  std::vector<std::uint64_t> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError("bad seed '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty seed list");
  return out;
}

void PrintSummary(const SimulationReport& r) {
  std::cout << r.scenario << " seed " << r.seed << ": E[T] " << Fixed(r.mean_t, 1) << " s (sd "
            << Fixed(r.sd_t, 1) << "), E[Q] " << Fixed(r.mean_queue_bytes / 1000.0, 1) << " KB / "
            << Fixed(r.mean_queue_ms, 1) << " ms, busy " << Fixed(r.busy_fraction, 3)
            << ", TCP/uTP " << Fixed(r.data_share.tcp_pct, 1) << "/"
            << Fixed(r.data_share.utp_pct, 1) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flash-crowd swarm simulator with uTP/LEDBAT and TCP uplinks"};
  app.require_subcommand(1);

  std::string config_arg;
  std::optional<std::uint64_t> run_seed;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run one replication of a scenario");
  run->add_option("config", config_arg, "Config file or preset name")->required();
  run->add_option("--seed", run_seed, "RNG seed (default: first seed in the config)");
  run->add_option("--out", out_dir, "Output directory");

  std::vector<std::string> suite_args;
  std::string suite_seeds;
  std::string suite_out;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* suite = app.add_subcommand("suite", "Run replications of several scenarios");
  suite->add_option("configs", suite_args, "Config files or preset names")->required();
  suite->add_option("--seeds", suite_seeds, "Comma-separated seeds for every scenario");
  suite->add_option("--out", suite_out, "Output directory")->required();
  suite->add_option("--jobs,-j", jobs, "Parallel runs")->check(CLI::PositiveNumber);

  auto* presets = app.add_subcommand("presets", "Built-in scenarios");
  presets->require_subcommand(1);
  presets->add_subcommand("list", "List preset names");
  std::string show_name;
  auto* show = presets->add_subcommand("show", "Print a preset as a config file");
  show->add_option("name", show_name)->required();

  std::string validate_arg;
  auto* validate = app.add_subcommand("validate", "Check a config file");
  validate->add_option("config", validate_arg)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return Fail("usage", e.what());
  }

  try {
    if (*run) {
      const ScenarioConfig config = Resolve(config_arg);
      const std::uint64_t seed = run_seed.value_or(config.seeds.front());
      const RunRecord record = RunSwarm(config, seed);
      const SimulationReport report = BuildReport(record);
      if (!out_dir.empty()) {
        WriteRunOutputs(fs::path(out_dir) / config.name / std::to_string(seed), record, report);
      }
      PrintSummary(report);
    } else if (*suite) {
      std::vector<ScenarioConfig> configs;
      for (const auto& arg : suite_args) configs.push_back(Resolve(arg));
      SuiteOptions options;
      options.out = suite_out;
      options.jobs = jobs;
      if (!suite_seeds.empty()) options.seeds = ParseSeeds(suite_seeds);
      for (const ScenarioSummary& s : RunSuite(configs, options)) {
        std::cout << s.scenario << ": " << s.runs.size() << " runs, E[T] " << Fixed(s.mean_t, 1)
                  << " s, E[Q] " << Fixed(s.mean_queue_ms, 1) << " ms, TCP share "
                  << Fixed(s.tcp_share, 1) << "%\n";
      }
    } else if (*presets) {
      if (show->parsed()) {
        auto preset = FindPreset(show_name);
        if (!preset) return Fail("config", "unknown preset '" + show_name + "'");
        std::cout << SerializeConfig(*preset);
      } else {
        for (const auto& name : PresetNames()) std::cout << name << '\n';
      }
    } else if (*validate) {
      const ScenarioConfig config = Resolve(validate_arg);
      const auto cut = PeersCutOffFromSeeds(config);
      std::cout << config.name << ": ok, " << config.peer_count() << " peers, "
                << config.chunk_count() << " chunks";
      if (!cut.empty()) std::cout << ", " << cut.size() << " leechers cannot reach a seed";
      std::cout << '\n';
    }
  } catch (const ConfigError& e) {
    return Fail("config", e.what());
  } catch (const SwarmDeadlock& e) {
    return Fail("deadlock", e.what(),
                {{"time_s", ToSeconds(e.at())}, {"incomplete", e.incomplete()},
                 {"unreachable", e.unreachable()}});
  } catch (const SuiteError& e) {
    return Fail("run", e.what(), {{"scenario", e.scenario()}, {"seed", e.seed()}});
  } catch (const std::exception& e) {
    return Fail("internal", e.what());
  }
  return 0;
}
