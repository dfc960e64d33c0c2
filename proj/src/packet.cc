#include "swarmsim/packet.h"

namespace swarmsim {

const char* ProtocolName(Protocol protocol) {
  return protocol == Protocol::kTcp ? "tcp" : "utp";
}

}  // namespace swarmsim
