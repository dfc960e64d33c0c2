#ifndef SWARMSIM_PACKET_H
#define SWARMSIM_PACKET_H

#include <compare>
#include <cstdint>

#include "swarmsim/sim_time.h"

namespace swarmsim {

struct PeerId {
  std::uint32_t value = 0;
  auto operator<=>(const PeerId&) const = default;
};

enum class Protocol : std::uint8_t { kTcp, kUtp };
enum class PacketKind : std::uint8_t { kData, kAck, kControl };

const char* ProtocolName(Protocol protocol);

enum class ControlType : std::uint8_t {
  kHandshake,
  kHandshakeReply,
  kRequest,
  kReject,
  kHave,
  kChoke,
  kUnchoke,
};

// A 16 KB request unit inside a chunk.
struct BlockRef {
  std::uint32_t chunk = 0;
  std::uint32_t block = 0;
  auto operator<=>(const BlockRef&) const = default;
};

inline constexpr std::uint32_t kMtuBytes = 1500;
inline constexpr std::uint32_t kDefaultMss = 1448;
inline constexpr std::uint32_t kAckBytes = 40;
inline constexpr std::uint32_t kControlBytes = 100;

struct Packet {
  PeerId src;
  PeerId dst;
  std::uint32_t connection = 0;
  Protocol protocol = Protocol::kUtp;
  PacketKind kind = PacketKind::kData;
  std::uint32_t size = 0;  // wire bytes, <= kMtuBytes
  SimTime send_timestamp{};

  // kData
  std::uint64_t seq = 0;
  std::uint32_t payload = 0;
  BlockRef block;

  // kAck: cumulative next-expected sequence, plus the echoed send time and
  // the one-way delay of the data packet that triggered it.
  std::uint64_t ack_next = 0;
  SimTime echo_timestamp{};
  SimTime owd_sample{};

  // kControl
  ControlType control = ControlType::kHave;
  BlockRef ref;
};

// One-way delay observed by the receiver. Virtual clocks are perfectly
// synchronized, so this is exact.
inline SimTime OwdAtReceiver(const Packet& packet, SimTime now) {
  return now - packet.send_timestamp;
}

}  // namespace swarmsim

#endif  // SWARMSIM_PACKET_H
