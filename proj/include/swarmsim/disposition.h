#ifndef SWARMSIM_DISPOSITION_H
#define SWARMSIM_DISPOSITION_H

#include <cstdint>
#include <optional>

#include "swarmsim/packet.h"

namespace swarmsim {

// uTorrent's bt.transp_disposition bitmask.
class TransportDisposition {
 public:
  static constexpr std::uint8_t kOutTcp = 1;
  static constexpr std::uint8_t kOutUtp = 2;
  static constexpr std::uint8_t kInTcp = 4;
  static constexpr std::uint8_t kInUtp = 8;
  static constexpr std::uint8_t kNewHeader = 16;  // carried, no effect

  static constexpr int kDefault = 31;
  static constexpr int kTcpOnly = 5;
  static constexpr int kUtpOnly = 10;
  static constexpr int kPreferTcp = 13;
  static constexpr int kPreferUtp = 14;

  constexpr TransportDisposition() = default;
  // Throws std::out_of_range outside [0, 31].
  explicit TransportDisposition(int value);

  constexpr int value() const { return bits_; }
  constexpr bool attempts_tcp() const { return bits_ & kOutTcp; }
  constexpr bool attempts_utp() const { return bits_ & kOutUtp; }
  constexpr bool accepts_tcp() const { return bits_ & kInTcp; }
  constexpr bool accepts_utp() const { return bits_ & kInUtp; }

  constexpr bool operator==(const TransportDisposition&) const = default;

 private:
  std::uint8_t bits_ = kDefault;
};

bool UtpFeasible(TransportDisposition a, TransportDisposition b);
bool TcpFeasible(TransportDisposition a, TransportDisposition b);

// Transport that carries data between two peers once connection setup
// settles: uTP whenever some endpoint can open it towards the other (the
// opened connection is bidirectional, and a parallel TCP connection is
// closed in its favor), otherwise TCP if feasible, otherwise nothing.
// Symmetric in its arguments.
std::optional<Protocol> NegotiateConnection(TransportDisposition a,
                                            TransportDisposition b);

// True when both transports are feasible and at least one endpoint attempts
// both outgoing, so the two handshakes race. A lost race leaves the pair on
// TCP.
bool HandshakesRace(TransportDisposition a, TransportDisposition b);

// Which endpoint opens a connection of |protocol|: |a| if it can, else |b|.
// Precondition: the protocol is feasible for the pair.
bool FirstOpens(TransportDisposition a, TransportDisposition b, Protocol protocol);

}  // namespace swarmsim

#endif  // SWARMSIM_DISPOSITION_H
