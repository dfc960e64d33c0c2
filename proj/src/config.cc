#include "swarmsim/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "swarmsim/disposition.h"
#include "swarmsim/rng.h"

namespace swarmsim {
namespace {

namespace pt = boost::property_tree;

constexpr std::string_view kClassPrefix = "class:";

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

template <typename Int>
Int ParseInt(const std::string& where, const std::string& text) {
  const std::string t = Trim(text);
  Int value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(where + ": expected an integer, got '" + text + "'");
  }
  return value;
}

double ParseDouble(const std::string& where, const std::string& text) {
  const std::string t = Trim(text);
  std::istringstream in(t);
  in.imbue(std::locale::classic());
  double value;
  if (!(in >> value) || !in.eof()) {
    throw ConfigError(where + ": expected a number, got '" + text + "'");
  }
  return value;
}

template <typename Int>
std::vector<Int> ParseList(const std::string& where, const std::string& text) {
  std::vector<Int> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(ParseInt<Int>(where, item));
  return out;
}

template <typename T>
std::string JoinList(const std::vector<T>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(items[i]);
  }
  return out;
}

std::string FormatDouble(double v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << std::setprecision(17) << v;
  return out.str();
}

// Applies each key of |section| through |handlers|; anything unhandled is a
// typo and rejected.
template <typename Handler>
void ForEachKey(const pt::ptree& section, const std::string& section_name, Handler&& handle) {
  for (const auto& [key, node] : section) {
    const std::string where = "[" + section_name + "] " + key;
    if (!handle(key, where, node.data())) {
      throw ConfigError("unknown key " + where);
    }
  }
}

void ParseScenario(const pt::ptree& section, ScenarioConfig& c) {
  ForEachKey(section, "scenario", [&](const std::string& key, const std::string& where,
                                      const std::string& v) {
    if (key == "name") c.name = Trim(v);
    else if (key == "file_size") c.file_size = ParseInt<std::int64_t>(where, v);
    else if (key == "chunk_size") c.chunk_size = ParseInt<std::int64_t>(where, v);
    else if (key == "block_size") c.block_size = ParseInt<std::int64_t>(where, v);
    else if (key == "buffer_seconds") c.buffer_seconds = ParseDouble(where, v);
    else if (key == "base_owd_us") c.base_owd = SimTime{ParseInt<std::int64_t>(where, v)};
    else if (key == "pipeline_depth") c.pipeline_depth = ParseInt<int>(where, v);
    else if (key == "upload_slots") c.upload_slots = ParseInt<int>(where, v);
    else if (key == "rechoke_interval_us") c.rechoke_interval = SimTime{ParseInt<std::int64_t>(where, v)};
    else if (key == "optimistic_interval_us") c.optimistic_interval = SimTime{ParseInt<std::int64_t>(where, v)};
    else if (key == "rate_window_us") c.rate_window = SimTime{ParseInt<std::int64_t>(where, v)};
    else if (key == "utp_race_loss") c.utp_race_loss = ParseDouble(where, v);
    else return false;
    return true;
  });
}

void ParseTransport(const pt::ptree& section, TransportParams& t) {
  ForEachKey(section, "transport", [&](const std::string& key, const std::string& where,
                                       const std::string& v) {
    if (key == "mss") t.mss = ParseInt<std::int64_t>(where, v);
    else if (key == "ledbat_gain") t.ledbat_gain = ParseDouble(where, v);
    else if (key == "ledbat_initial_window") t.ledbat_initial_window = ParseInt<int>(where, v);
    else if (key == "ledbat_allowed_increase") t.ledbat_allowed_increase = ParseInt<int>(where, v);
    else if (key == "tcp_flavor") {
      if (!ParseTcpFlavor(Trim(v), &t.tcp_flavor)) {
        throw ConfigError(where + ": expected newreno or cubic, got '" + v + "'");
      }
    }
    else if (key == "tcp_initial_window") t.tcp_initial_window = ParseInt<int>(where, v);
    else if (key == "min_rto_us") t.min_rto = SimTime{ParseInt<std::int64_t>(where, v)};
    else if (key == "initial_rto_us") t.initial_rto = SimTime{ParseInt<std::int64_t>(where, v)};
    else if (key == "rto_srtt_multiplier") t.rto_srtt_multiplier = ParseInt<int>(where, v);
    else return false;
    return true;
  });
}

void ParseSeeders(const pt::ptree& section, ScenarioConfig& c) {
  ForEachKey(section, "seeders", [&](const std::string& key, const std::string& where,
                                     const std::string& v) {
    if (key == "count") c.seed_count = ParseInt<int>(where, v);
    else if (key == "uplink_bps") c.seed_uplink_bps = ParseInt<std::int64_t>(where, v);
    else return false;
    return true;
  });
}

void ParseRun(const pt::ptree& section, ScenarioConfig& c) {
  ForEachKey(section, "run", [&](const std::string& key, const std::string& where,
                                 const std::string& v) {
    if (key == "seeds") c.seeds = ParseList<std::uint64_t>(where, v);
    else if (key == "time_limit_us") c.time_limit = SimTime{ParseInt<std::int64_t>(where, v)};
    else if (key == "stop") {
      if (Trim(v) != "all-leechers-complete") {
        throw ConfigError(where + ": only 'all-leechers-complete' is supported");
      }
    }
    else return false;
    return true;
  });
}

PeerClass ParseClass(const pt::ptree& section, const std::string& section_name) {
  PeerClass pc;
  pc.name = section_name.substr(kClassPrefix.size());
  ForEachKey(section, section_name, [&](const std::string& key, const std::string& where,
                                        const std::string& v) {
    if (key == "count") pc.count = ParseInt<int>(where, v);
    else if (key == "disposition") pc.disposition = ParseInt<int>(where, v);
    else if (key == "dispositions") pc.dispositions = ParseList<int>(where, v);
    else if (key == "uplink_bps") pc.uplink_bps = ParseInt<std::int64_t>(where, v);
    else if (key == "target_us") pc.target = SimTime{ParseInt<std::int64_t>(where, v)};
    else return false;
    return true;
  });
  return pc;
}

}  // namespace

int ScenarioConfig::leecher_count() const {
  int n = 0;
  for (const auto& c : classes) n += c.size();
  return n;
}

void Validate(const ScenarioConfig& c) {
  if (c.name.empty()) throw ConfigError("scenario name is empty");
  if (c.seed_count < 1) throw ConfigError("at least one seed is required");
  if (c.leecher_count() < 1) throw ConfigError("at least one leecher is required");
  if (c.seed_uplink_bps <= 0) throw ConfigError("seed uplink must be positive");
  std::set<std::string> names;
  for (const auto& pc : c.classes) {
    if (pc.name.empty()) throw ConfigError("peer class without a name");
    if (!names.insert(pc.name).second) throw ConfigError("duplicate peer class " + pc.name);
    if (pc.dispositions.empty() && pc.count < 0) throw ConfigError("class " + pc.name + ": negative count");
    if (!pc.dispositions.empty() && pc.count != 0 && pc.count != pc.size()) {
      throw ConfigError("class " + pc.name + ": count disagrees with dispositions list");
    }
    for (int i = 0; i < pc.size(); ++i) {
      const int d = pc.DispositionOf(i);
      if (d < 0 || d > 31) {
        throw ConfigError("class " + pc.name + ": disposition " + std::to_string(d) +
                          " outside [0,31]");
      }
    }
    if (pc.uplink_bps <= 0) throw ConfigError("class " + pc.name + ": uplink must be positive");
    if (pc.target <= kZeroTime) throw ConfigError("class " + pc.name + ": target must be positive");
  }
  if (c.file_size <= 0) throw ConfigError("file_size must be positive");
  if (c.block_size <= 0) throw ConfigError("block_size must be positive");
  if (c.chunk_size < c.block_size || c.chunk_size % c.block_size != 0) {
    throw ConfigError("chunk_size must be a positive multiple of block_size");
  }
  if (!(c.buffer_seconds > 0)) throw ConfigError("buffer_seconds must be positive");
  if (c.base_owd < kZeroTime) throw ConfigError("base_owd must be non-negative");
  if (c.pipeline_depth < 1) throw ConfigError("pipeline_depth must be at least 1");
  if (c.upload_slots < 1) throw ConfigError("upload_slots must be at least 1");
  if (c.rechoke_interval <= kZeroTime) throw ConfigError("rechoke interval must be positive");
  if (c.optimistic_interval < c.rechoke_interval ||
      c.optimistic_interval % c.rechoke_interval != kZeroTime) {
    throw ConfigError("optimistic interval must be a multiple of the rechoke interval");
  }
  if (c.rate_window < c.rechoke_interval ||
      c.rate_window % c.rechoke_interval != kZeroTime) {
    throw ConfigError("rate window must be a multiple of the rechoke interval");
  }
  if (c.utp_race_loss < 0 || c.utp_race_loss > 1) throw ConfigError("utp_race_loss must be in [0,1]");
  const auto& t = c.transport;
  if (t.mss <= 0 || t.mss > static_cast<std::int64_t>(kMtuBytes) - 40) {
    throw ConfigError("mss must be in (0, 1460]");
  }
  if (!(t.ledbat_gain > 0)) throw ConfigError("ledbat_gain must be positive");
  if (t.ledbat_initial_window < 1 || t.tcp_initial_window < 1) {
    throw ConfigError("initial windows must be at least one segment");
  }
  if (t.min_rto <= kZeroTime || t.initial_rto <= kZeroTime || t.rto_srtt_multiplier < 1) {
    throw ConfigError("retransmission timer settings must be positive");
  }
  if (c.seeds.empty()) throw ConfigError("seed list is empty");
  if (c.time_limit <= kZeroTime) throw ConfigError("time limit must be positive");
}

ScenarioConfig ParseConfig(std::string_view text) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  ScenarioConfig c;
  c.classes.clear();
  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty()) {
      throw ConfigError("key outside of any section: " + name);
    }
    if (name == "scenario") ParseScenario(section, c);
    else if (name == "transport") ParseTransport(section, c.transport);
    else if (name == "seeders") ParseSeeders(section, c);
    else if (name == "run") ParseRun(section, c);
    else if (name.rfind(kClassPrefix, 0) == 0) c.classes.push_back(ParseClass(section, name));
    else throw ConfigError("unknown section [" + name + "]");
  }
  Validate(c);
  return c;
}

ScenarioConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str());
}

std::string SerializeConfig(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "[scenario]\n"
      << "name = " << c.name << "\n"
      << "file_size = " << c.file_size << "\n"
      << "chunk_size = " << c.chunk_size << "\n"
      << "block_size = " << c.block_size << "\n"
      << "buffer_seconds = " << FormatDouble(c.buffer_seconds) << "\n"
      << "base_owd_us = " << c.base_owd.count() << "\n"
      << "pipeline_depth = " << c.pipeline_depth << "\n"
      << "upload_slots = " << c.upload_slots << "\n"
      << "rechoke_interval_us = " << c.rechoke_interval.count() << "\n"
      << "optimistic_interval_us = " << c.optimistic_interval.count() << "\n"
      << "rate_window_us = " << c.rate_window.count() << "\n"
      << "utp_race_loss = " << FormatDouble(c.utp_race_loss) << "\n\n";
  const auto& t = c.transport;
  out << "[transport]\n"
      << "mss = " << t.mss << "\n"
      << "ledbat_gain = " << FormatDouble(t.ledbat_gain) << "\n"
      << "ledbat_initial_window = " << t.ledbat_initial_window << "\n"
      << "ledbat_allowed_increase = " << t.ledbat_allowed_increase << "\n"
      << "tcp_flavor = " << TcpFlavorName(t.tcp_flavor) << "\n"
      << "tcp_initial_window = " << t.tcp_initial_window << "\n"
      << "min_rto_us = " << t.min_rto.count() << "\n"
      << "initial_rto_us = " << t.initial_rto.count() << "\n"
      << "rto_srtt_multiplier = " << t.rto_srtt_multiplier << "\n\n";
  out << "[seeders]\n"
      << "count = " << c.seed_count << "\n"
      << "uplink_bps = " << c.seed_uplink_bps << "\n\n";
  for (const auto& pc : c.classes) {
    out << "[" << kClassPrefix << pc.name << "]\n";
    if (pc.dispositions.empty()) {
      out << "count = " << pc.count << "\n"
          << "disposition = " << pc.disposition << "\n";
    } else {
      out << "dispositions = " << JoinList(pc.dispositions) << "\n";
    }
    out << "uplink_bps = " << pc.uplink_bps << "\n"
        << "target_us = " << pc.target.count() << "\n\n";
  }
  out << "[run]\n"
      << "seeds = " << JoinList(c.seeds) << "\n"
      << "time_limit_us = " << c.time_limit.count() << "\n"
      << "stop = all-leechers-complete\n";
  return out.str();
}

std::uint64_t ConfigDigest(const ScenarioConfig& config) {
  ScenarioConfig copy = config;
  copy.seeds.clear();
  return Fnv1a64(SerializeConfig(copy));
}

}  // namespace swarmsim
