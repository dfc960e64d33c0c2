#include "swarmsim/presets.h"

#include <cmath>

#include "swarmsim/disposition.h"

namespace swarmsim {
namespace {

constexpr std::int64_t kMiB = 1024 * 1024;
constexpr std::int64_t kKiB = 1024;

struct Scale {
  std::string_view prefix;
  int leechers;
  std::int64_t file_size;
  std::int64_t chunk_size;
};

constexpr Scale kFull{"", 75, 100 * kMiB, 1 * kMiB};
constexpr Scale kDesk{"desk-", 23, 10 * kMiB, 256 * kKiB};

struct Shape {
  std::string_view name;
  int disposition;   // homogeneous swarms
  int tcp_percent;   // heterogeneous swarms, -1 otherwise
};

constexpr Shape kShapes[] = {
    {"homog-default", TransportDisposition::kDefault, -1},
    {"homog-utp", TransportDisposition::kUtpOnly, -1},
    {"homog-tcp", TransportDisposition::kTcpOnly, -1},
    {"heter-75-25", 0, 75},
    {"heter-50-50", 0, 50},
    {"heter-25-75", 0, 25},
};

constexpr std::pair<std::string_view, std::int64_t> kCapacities[] = {
    {"", 1'000'000}, {"-2m", 2'000'000}, {"-5m", 5'000'000}};

PeerClass MakeClass(std::string name, int count, int disposition) {
  PeerClass pc;
  pc.name = std::move(name);
  pc.count = count;
  pc.disposition = disposition;
  return pc;
}

void ApplyScale(ScenarioConfig& c, const Scale& s) {
  c.file_size = s.file_size;
  c.chunk_size = s.chunk_size;
}

void ApplyCapacity(ScenarioConfig& c, std::int64_t bps) {
  c.seed_uplink_bps = bps;
  for (auto& pc : c.classes) pc.uplink_bps = bps;
}

ScenarioConfig Build(const Scale& scale, const Shape& shape, std::string_view suffix,
                     std::int64_t bps) {
  std::string name = std::string(scale.prefix) + std::string(shape.name) + std::string(suffix);
  ScenarioConfig c = shape.tcp_percent < 0
                         ? HomogeneousSwarm(std::move(name), scale.leechers, shape.disposition)
                         : HeterogeneousSwarm(std::move(name), scale.leechers, shape.tcp_percent);
  ApplyScale(c, scale);
  ApplyCapacity(c, bps);
  return c;
}

}  // namespace

ScenarioConfig HomogeneousSwarm(std::string name, int leechers, int disposition) {
  ScenarioConfig c;
  c.name = std::move(name);
  c.classes = {MakeClass("leechers", leechers, disposition)};
  return c;
}

ScenarioConfig HeterogeneousSwarm(std::string name, int leechers, int tcp_percent) {
  ScenarioConfig c;
  c.name = std::move(name);
  const int tcp = static_cast<int>(std::lround(leechers * tcp_percent / 100.0));
  c.classes = {MakeClass("tcp", tcp, TransportDisposition::kPreferTcp),
               MakeClass("utp", leechers - tcp, TransportDisposition::kPreferUtp)};
  return c;
}

std::vector<std::string> PresetNames() {
  std::vector<std::string> names;
  for (const Scale* scale : {&kFull, &kDesk}) {
    for (const auto& [suffix, bps] : kCapacities) {
      for (const Shape& shape : kShapes) {
        names.push_back(std::string(scale->prefix) + std::string(shape.name) + std::string(suffix));
      }
    }
  }
  return names;
}

std::optional<ScenarioConfig> FindPreset(std::string_view name) {
  for (const Scale* scale : {&kFull, &kDesk}) {
    for (const auto& [suffix, bps] : kCapacities) {
      for (const Shape& shape : kShapes) {
        if (std::string(scale->prefix) + std::string(shape.name) + std::string(suffix) == name) {
          return Build(*scale, shape, suffix, bps);
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace swarmsim
