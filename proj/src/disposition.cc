#include "swarmsim/disposition.h"

#include <stdexcept>
#include <string>

namespace swarmsim {

TransportDisposition::TransportDisposition(int value) {
  if (value < 0 || value > 31) {
    throw std::out_of_range("transport disposition out of range [0,31]: " +
                            std::to_string(value));
  }
  bits_ = static_cast<std::uint8_t>(value);
}

bool UtpFeasible(TransportDisposition a, TransportDisposition b) {
  return (a.attempts_utp() && b.accepts_utp()) || (b.attempts_utp() && a.accepts_utp());
}

bool TcpFeasible(TransportDisposition a, TransportDisposition b) {
  return (a.attempts_tcp() && b.accepts_tcp()) || (b.attempts_tcp() && a.accepts_tcp());
}

std::optional<Protocol> NegotiateConnection(TransportDisposition a,
                                            TransportDisposition b) {
  if (UtpFeasible(a, b)) return Protocol::kUtp;
  if (TcpFeasible(a, b)) return Protocol::kTcp;
  return std::nullopt;
}

bool HandshakesRace(TransportDisposition a, TransportDisposition b) {
  if (!UtpFeasible(a, b) || !TcpFeasible(a, b)) return false;
  const auto dual = [](TransportDisposition d) { return d.attempts_tcp() && d.attempts_utp(); };
  return dual(a) || dual(b);
}

bool FirstOpens(TransportDisposition a, TransportDisposition b, Protocol protocol) {
  if (protocol == Protocol::kUtp) return a.attempts_utp() && b.accepts_utp();
  return a.attempts_tcp() && b.accepts_tcp();
}

}  // namespace swarmsim
