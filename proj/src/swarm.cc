#include "swarmsim/swarm.h"

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#include "swarmsim/choker.h"
#include "swarmsim/disposition.h"
#include "swarmsim/piece_picker.h"
#include "swarmsim/rng.h"
#include "swarmsim/stream.h"

namespace swarmsim {
namespace {

enum class BlockState : std::uint8_t { kMissing, kRequested, kReceived };

constexpr int kNone = -1;

struct Neighbor {
  std::uint32_t peer = 0;
  std::uint32_t conn = 0;
  int out = 0;  // index of the local->remote direction in the connection
  bool connected = false;

  std::vector<std::uint8_t> has;
  std::uint32_t wanted = 0;  // chunks remote has and we lack
  std::uint32_t offer = 0;   // chunks we have and remote lacks

  // Downloading from the remote.
  bool unchoked_by_remote = false;
  int outstanding = 0;
  int chunk = kNone;
  std::uint32_t partial_bytes = 0;

  // Uploading to the remote.
  bool unchoking = false;

  // Two rechoke periods of history, [0] is the current one.
  std::array<std::uint64_t, 2> received{};
  std::array<std::uint64_t, 2> sent{};
};

struct Peer {
  std::uint32_t id = 0;
  bool initial_seed = false;
  int class_index = kNone;
  TransportDisposition disposition;
  TransportParams params;
  std::unique_ptr<AccessLink> uplink;

  std::vector<std::uint8_t> have;
  std::uint32_t have_count = 0;
  std::vector<std::vector<BlockState>> blocks;
  std::vector<std::uint16_t> progress;  // blocks requested or received
  std::vector<int> owner;               // neighbor slot fetching the chunk
  std::vector<int> availability;

  std::vector<Neighbor> neighbors;
  std::vector<int> slot_of;  // by peer id
  int unchoked = 0;
  std::optional<std::uint32_t> optimistic;
  int rechoke_ticks = 0;

  std::optional<SimTime> completion;
  std::uint64_t uploaded = 0;
  std::uint64_t downloaded = 0;
  std::uint64_t duplicates = 0;

  RngStream picker{0};
  RngStream choker{0};
};

struct Direction {
  std::unique_ptr<StreamSender> sender;
  StreamReceiver receiver;
};

struct Connection {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  Protocol protocol = Protocol::kUtp;
  std::array<Direction, 2> dir;  // [0] carries a->b data
  std::uint64_t data_bytes = 0;
};

struct PlannedConnection {
  std::uint32_t opener;
  std::uint32_t acceptor;
  Protocol protocol;
};

struct PeerLayout {
  std::vector<int> class_index;  // kNone for seeds
  std::vector<TransportDisposition> disposition;
};

PeerLayout LayOut(const ScenarioConfig& config) {
  PeerLayout layout;
  for (int i = 0; i < config.seed_count; ++i) {
    layout.class_index.push_back(kNone);
    layout.disposition.emplace_back(TransportDisposition::kDefault);
  }
  for (std::size_t c = 0; c < config.classes.size(); ++c) {
    const PeerClass& pc = config.classes[c];
    for (int i = 0; i < pc.size(); ++i) {
      layout.class_index.push_back(static_cast<int>(c));
      layout.disposition.emplace_back(pc.DispositionOf(i));
    }
  }
  return layout;
}

// Union-find over peers joined by a feasible transport.
std::vector<std::uint32_t> Components(const PeerLayout& layout) {
  const std::size_t n = layout.disposition.size();
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (NegotiateConnection(layout.disposition[i], layout.disposition[j])) {
        parent[find(static_cast<std::uint32_t>(i))] = find(static_cast<std::uint32_t>(j));
      }
    }
  }
  std::vector<std::uint32_t> component(n);
  for (std::size_t i = 0; i < n; ++i) component[i] = find(static_cast<std::uint32_t>(i));
  return component;
}

std::vector<std::uint32_t> CutOff(const PeerLayout& layout) {
  const auto component = Components(layout);
  std::set<std::uint32_t> seeded;
  for (std::size_t i = 0; i < component.size(); ++i) {
    if (layout.class_index[i] == kNone) seeded.insert(component[i]);
  }
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < component.size(); ++i) {
    if (!seeded.count(component[i])) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

class Swarm {
 public:
  Swarm(const ScenarioConfig& config, std::uint64_t seed)
      : config_(config), seed_(seed), layout_(LayOut(config)) {
    chunks_ = config_.chunk_count();
    Build();
  }

  RunRecord Run();

 private:
  void Build();
  void PlanConnections();

  std::uint32_t ChunkBytes(std::uint32_t c) const {
    const std::int64_t start = static_cast<std::int64_t>(c) * config_.chunk_size;
    return static_cast<std::uint32_t>(std::min(config_.chunk_size, config_.file_size - start));
  }
  std::uint32_t BlockCount(std::uint32_t c) const {
    return static_cast<std::uint32_t>((ChunkBytes(c) + config_.block_size - 1) / config_.block_size);
  }
  std::uint32_t BlockBytes(BlockRef r) const {
    const std::int64_t start = static_cast<std::int64_t>(r.block) * config_.block_size;
    return static_cast<std::uint32_t>(std::min<std::int64_t>(config_.block_size, ChunkBytes(r.chunk) - start));
  }

  bool Complete(const Peer& p) const { return p.have_count == chunks_; }

  int AddNeighbor(Peer& p, std::uint32_t remote, std::uint32_t conn);
  void Announce(std::uint32_t peer);

  void Send(Packet packet);
  void SendControl(Peer& from, int slot, ControlType type, BlockRef ref = {});
  void OnArrival(const Packet& packet);
  void OnData(const Packet& packet);
  void OnControl(const Packet& packet);

  void OnHandshake(Peer& p, int slot);
  void OnHave(Peer& p, int slot, std::uint32_t chunk);
  void OnRequest(Peer& p, int slot, BlockRef ref);
  void OnReject(Peer& p, int slot, BlockRef ref);
  void OnChoked(Peer& p, int slot);
  void OnBlock(Peer& p, int slot, BlockRef ref, Protocol protocol);
  void OnChunkComplete(Peer& p, std::uint32_t chunk);

  std::optional<BlockRef> NextBlock(Peer& p, int slot);
  void ReleaseChunk(Peer& p, int slot);
  void FillPipeline(Peer& p, int slot);
  void FillAll(Peer& p);

  void Unchoke(Peer& p, int slot);
  void Choke(Peer& p, int slot);
  void RefillSlots(Peer& p);
  void Rechoke(std::uint32_t peer);

  [[noreturn]] void ReportDeadlock(SimTime at, bool time_limit);

  const ScenarioConfig& config_;
  std::uint64_t seed_;
  PeerLayout layout_;
  std::uint32_t chunks_ = 0;

  Simulator sim_;
  std::vector<Peer> peers_;
  std::vector<Connection> connections_;
  std::vector<std::vector<PlannedConnection>> planned_;  // by opener
  int leechers_left_ = 0;

  std::array<std::uint64_t, 2> data_bytes_{};
  std::array<std::uint64_t, 2> wire_bytes_{};
  std::uint64_t integrity_violations_ = 0;
  std::uint64_t control_retries_ = 0;
  std::vector<StreamReceiver::Delivery> scratch_;
};

std::size_t Index(Protocol p) { return static_cast<std::size_t>(p); }

void Swarm::Build() {
  const std::size_t n = layout_.disposition.size();
  peers_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Peer& p = peers_[i];
    p.id = static_cast<std::uint32_t>(i);
    p.class_index = layout_.class_index[i];
    p.initial_seed = p.class_index == kNone;
    p.disposition = layout_.disposition[i];
    p.params = config_.transport;
    std::int64_t uplink = config_.seed_uplink_bps;
    if (!p.initial_seed) {
      const PeerClass& pc = config_.classes[p.class_index];
      p.params.ledbat_target = pc.target;
      uplink = pc.uplink_bps;
    }
    p.uplink = std::make_unique<AccessLink>(
        sim_, uplink, BufferForSeconds(uplink, config_.buffer_seconds), config_.base_owd,
        [this](const Packet& packet) { OnArrival(packet); });
    p.have.assign(chunks_, p.initial_seed ? 1 : 0);
    p.have_count = p.initial_seed ? chunks_ : 0;
    if (!p.initial_seed) {
      p.blocks.resize(chunks_);
      for (std::uint32_t c = 0; c < chunks_; ++c) p.blocks[c].assign(BlockCount(c), BlockState::kMissing);
      p.progress.assign(chunks_, 0);
      p.owner.assign(chunks_, kNone);
      ++leechers_left_;
    }
    p.availability.assign(chunks_, 0);
    p.slot_of.assign(n, kNone);
    const std::string suffix = "/" + std::to_string(i);
    p.picker = RngStream::Substream(seed_, "picker" + suffix);
    p.choker = RngStream::Substream(seed_, "choker" + suffix);
  }
  PlanConnections();

  RngStream phase = RngStream::Substream(seed_, "rechoke-phase");
  for (std::uint32_t i = 0; i < n; ++i) {
    sim_.Schedule(kZeroTime, EventKind::kTrackerAnnounce, [this, i] { Announce(i); });
    const SimTime offset{static_cast<std::int64_t>(
        phase.UniformBelow(static_cast<std::uint64_t>(config_.rechoke_interval.count())))};
    sim_.Schedule(offset + config_.rechoke_interval, EventKind::kRechokeTick,
                  [this, i] { Rechoke(i); }, /*housekeeping=*/true);
  }
}

void Swarm::PlanConnections() {
  RngStream race = RngStream::Substream(seed_, "negotiation");
  planned_.resize(peers_.size());
  for (std::uint32_t i = 0; i < peers_.size(); ++i) {
    for (std::uint32_t j = i + 1; j < peers_.size(); ++j) {
      const TransportDisposition a = layout_.disposition[i];
      const TransportDisposition b = layout_.disposition[j];
      std::optional<Protocol> protocol = NegotiateConnection(a, b);
      if (!protocol) continue;
      // Drawn for every racing pair so that the stream stays aligned when
      // the probability changes.
      if (HandshakesRace(a, b) && race.Bernoulli(config_.utp_race_loss)) {
        protocol = Protocol::kTcp;
      }
      const bool a_opens = FirstOpens(a, b, *protocol);
      planned_[a_opens ? i : j].push_back({a_opens ? i : j, a_opens ? j : i, *protocol});
    }
  }
}

int Swarm::AddNeighbor(Peer& p, std::uint32_t remote, std::uint32_t conn) {
  Neighbor n;
  n.peer = remote;
  n.conn = conn;
  n.out = connections_[conn].a == p.id ? 0 : 1;
  n.has.assign(chunks_, 0);
  p.neighbors.push_back(std::move(n));
  const int slot = static_cast<int>(p.neighbors.size()) - 1;
  p.slot_of[remote] = slot;
  return slot;
}

void Swarm::Announce(std::uint32_t id) {
  for (const PlannedConnection& plan : planned_[id]) {
    const auto conn_id = static_cast<std::uint32_t>(connections_.size());
    Connection& conn = connections_.emplace_back();
    conn.a = plan.opener;
    conn.b = plan.acceptor;
    conn.protocol = plan.protocol;
    for (int d = 0; d < 2; ++d) {
      const std::uint32_t src = d == 0 ? conn.a : conn.b;
      const std::uint32_t dst = d == 0 ? conn.b : conn.a;
      conn.dir[d].sender = std::make_unique<StreamSender>(
          sim_, plan.protocol, peers_[src].params,
          [this, conn_id, src, dst](Packet&& p) {
            p.src = PeerId{src};
            p.dst = PeerId{dst};
            p.connection = conn_id;
            Send(std::move(p));
          });
    }
    Peer& opener = peers_[plan.opener];
    const int slot = AddNeighbor(opener, plan.acceptor, conn_id);
    SendControl(opener, slot, ControlType::kHandshake);
  }
}

void Swarm::Send(Packet packet) {
  Peer& from = peers_[packet.src.value];
  if (from.uplink->Enqueue(packet) == EnqueueResult::kAccepted) return;
  if (packet.kind != PacketKind::kControl) return;  // the stream recovers it
  // Control traffic has no congestion window; a local drop is retried once
  // the connection's retransmission timer would have fired.
  ++control_retries_;
  const Connection& conn = connections_[packet.connection];
  const int out = conn.a == packet.src.value ? 0 : 1;
  sim_.ScheduleIn(conn.dir[out].sender->rto(), EventKind::kTimerExpiry,
                  [this, packet]() mutable {
                    packet.send_timestamp = sim_.Now();
                    Send(std::move(packet));
                  });
}

void Swarm::SendControl(Peer& from, int slot, ControlType type, BlockRef ref) {
  const Neighbor& n = from.neighbors[slot];
  Packet p;
  p.src = PeerId{from.id};
  p.dst = PeerId{n.peer};
  p.connection = n.conn;
  p.protocol = connections_[n.conn].protocol;
  p.kind = PacketKind::kControl;
  p.size = kControlBytes;
  p.send_timestamp = sim_.Now();
  p.control = type;
  p.ref = ref;
  Send(std::move(p));
}

void Swarm::OnArrival(const Packet& packet) {
  wire_bytes_[Index(packet.protocol)] += packet.size;
  switch (packet.kind) {
    case PacketKind::kData:
      OnData(packet);
      break;
    case PacketKind::kAck: {
      Connection& conn = connections_[packet.connection];
      const int d = conn.a == packet.dst.value ? 0 : 1;
      conn.dir[d].sender->OnAck(packet);
      break;
    }
    case PacketKind::kControl:
      OnControl(packet);
      break;
  }
}

void Swarm::OnData(const Packet& packet) {
  Connection& conn = connections_[packet.connection];
  const int d = conn.a == packet.src.value ? 0 : 1;
  scratch_.clear();
  Packet ack = conn.dir[d].receiver.OnData(packet, sim_.Now(), scratch_);
  ack.src = packet.dst;
  ack.dst = packet.src;
  Send(std::move(ack));

  Peer& p = peers_[packet.dst.value];
  const int slot = p.slot_of[packet.src.value];
  // Deliveries can complete several blocks; copy since OnBlock may recurse
  // into the stream and reuse the scratch buffer.
  const std::vector<StreamReceiver::Delivery> delivered = scratch_;
  for (const auto& piece : delivered) {
    Neighbor& n = p.neighbors[slot];
    n.partial_bytes += piece.payload;
    if (n.partial_bytes < BlockBytes(piece.block)) continue;
    n.partial_bytes = 0;
    conn.data_bytes += BlockBytes(piece.block);
    OnBlock(p, slot, piece.block, conn.protocol);
  }
}

void Swarm::OnControl(const Packet& packet) {
  Peer& p = peers_[packet.dst.value];
  int slot = p.slot_of[packet.src.value];
  if (packet.control == ControlType::kHandshake) {
    if (slot == kNone) slot = AddNeighbor(p, packet.src.value, packet.connection);
    SendControl(p, slot, ControlType::kHandshakeReply);
    OnHandshake(p, slot);
    return;
  }
  if (slot == kNone) return;
  switch (packet.control) {
    case ControlType::kHandshakeReply:
      OnHandshake(p, slot);
      break;
    case ControlType::kHave:
      OnHave(p, slot, packet.ref.chunk);
      break;
    case ControlType::kRequest:
      OnRequest(p, slot, packet.ref);
      break;
    case ControlType::kReject:
      OnReject(p, slot, packet.ref);
      break;
    case ControlType::kChoke:
      OnChoked(p, slot);
      break;
    case ControlType::kUnchoke:
      p.neighbors[slot].unchoked_by_remote = true;
      FillPipeline(p, slot);
      break;
    case ControlType::kHandshake:
      break;
  }
}

void Swarm::OnHandshake(Peer& p, int slot) {
  Neighbor& n = p.neighbors[slot];
  if (n.connected) return;
  n.connected = true;
  // The bitfield rides on the handshake and reflects the remote's state as
  // of its arrival; later HAVEs for the same chunks are no-ops.
  const Peer& remote = peers_[n.peer];
  for (std::uint32_t c = 0; c < chunks_; ++c) {
    if (remote.have[c] && !n.has[c]) {
      n.has[c] = 1;
      ++p.availability[c];
    }
    if (n.has[c] && !p.have[c]) ++n.wanted;
    if (!n.has[c] && p.have[c]) ++n.offer;
  }
  if (n.offer > 0 && p.unchoked < config_.upload_slots) Unchoke(p, slot);
}

void Swarm::OnHave(Peer& p, int slot, std::uint32_t chunk) {
  Neighbor& n = p.neighbors[slot];
  if (!n.connected || n.has[chunk]) return;
  n.has[chunk] = 1;
  ++p.availability[chunk];
  if (p.have[chunk]) {
    --n.offer;
    if (n.offer == 0 && n.unchoking) {
      Choke(p, slot);
      RefillSlots(p);
    }
  } else {
    ++n.wanted;
    if (n.unchoked_by_remote) FillPipeline(p, slot);
  }
}

void Swarm::OnRequest(Peer& p, int slot, BlockRef ref) {
  Neighbor& n = p.neighbors[slot];
  if (!n.unchoking) {
    SendControl(p, slot, ControlType::kReject, ref);
    return;
  }
  if (!p.have[ref.chunk]) {
    ++integrity_violations_;
    SendControl(p, slot, ControlType::kReject, ref);
    return;
  }
  connections_[n.conn].dir[n.out].sender->Push(ref, BlockBytes(ref));
}

void Swarm::OnReject(Peer& p, int slot, BlockRef ref) {
  Neighbor& n = p.neighbors[slot];
  --n.outstanding;
  if (Complete(p)) return;
  BlockState& state = p.blocks[ref.chunk][ref.block];
  if (state == BlockState::kRequested) {
    state = BlockState::kMissing;
    --p.progress[ref.chunk];
  }
  FillAll(p);
}

void Swarm::OnChoked(Peer& p, int slot) {
  Neighbor& n = p.neighbors[slot];
  n.unchoked_by_remote = false;
  // Requests already sent are answered with data or a reject; the chunk is
  // opened up to other neighbors right away.
  if (n.chunk != kNone) {
    ReleaseChunk(p, slot);
    FillAll(p);
  }
}

void Swarm::OnBlock(Peer& p, int slot, BlockRef ref, Protocol protocol) {
  Neighbor& n = p.neighbors[slot];
  Peer& remote = peers_[n.peer];
  const std::uint32_t bytes = BlockBytes(ref);
  --n.outstanding;
  n.received[0] += bytes;
  if (const int back = remote.slot_of[p.id]; back != kNone) remote.neighbors[back].sent[0] += bytes;
  remote.uploaded += bytes;
  p.downloaded += bytes;
  data_bytes_[Index(protocol)] += bytes;

  if (p.have[ref.chunk] || p.blocks[ref.chunk][ref.block] == BlockState::kReceived) {
    ++p.duplicates;
  } else {
    BlockState& state = p.blocks[ref.chunk][ref.block];
    if (state == BlockState::kMissing) ++p.progress[ref.chunk];
    state = BlockState::kReceived;
    const auto& blocks = p.blocks[ref.chunk];
    if (std::all_of(blocks.begin(), blocks.end(),
                    [](BlockState s) { return s == BlockState::kReceived; })) {
      OnChunkComplete(p, ref.chunk);
    }
  }
  if (!Complete(p)) FillPipeline(p, slot);
}

void Swarm::OnChunkComplete(Peer& p, std::uint32_t chunk) {
  if (p.owner[chunk] != kNone) {
    p.neighbors[p.owner[chunk]].chunk = kNone;
    p.owner[chunk] = kNone;
  }
  p.have[chunk] = 1;
  ++p.have_count;
  for (int s = 0; s < static_cast<int>(p.neighbors.size()); ++s) {
    Neighbor& n = p.neighbors[s];
    SendControl(p, s, ControlType::kHave, BlockRef{chunk, 0});
    if (!n.connected) continue;
    if (n.has[chunk]) {
      --n.wanted;
    } else if (++n.offer == 1 && !n.unchoking && p.unchoked < config_.upload_slots) {
      Unchoke(p, s);
    }
  }
  if (Complete(p)) {
    p.completion = sim_.Now();
    --leechers_left_;
  }
}

void Swarm::ReleaseChunk(Peer& p, int slot) {
  Neighbor& n = p.neighbors[slot];
  if (n.chunk == kNone) return;
  p.owner[n.chunk] = kNone;
  n.chunk = kNone;
}

std::optional<BlockRef> Swarm::NextBlock(Peer& p, int slot) {
  Neighbor& n = p.neighbors[slot];
  for (;;) {
    if (n.chunk != kNone) {
      const auto c = static_cast<std::uint32_t>(n.chunk);
      const auto& blocks = p.blocks[c];
      const auto it = std::find(blocks.begin(), blocks.end(), BlockState::kMissing);
      if (it != blocks.end()) return BlockRef{c, static_cast<std::uint32_t>(it - blocks.begin())};
      ReleaseChunk(p, slot);
    }
    if (n.wanted == 0) return std::nullopt;

    // Finish partially fetched chunks before opening new ones.
    int pick = kNone;
    for (std::uint32_t c = 0; c < chunks_; ++c) {
      if (p.have[c] || !n.has[c] || p.owner[c] != kNone || p.progress[c] == 0) continue;
      if (p.progress[c] == p.blocks[c].size()) continue;
      if (pick == kNone || p.availability[c] < p.availability[pick]) pick = static_cast<int>(c);
    }
    if (pick == kNone) {
      std::vector<std::uint8_t> busy(chunks_);
      for (std::uint32_t c = 0; c < chunks_; ++c) {
        busy[c] = p.owner[c] != kNone || p.progress[c] > 0;
      }
      const auto chosen = SelectNextChunk(p.have, busy, n.has, p.availability, p.picker);
      if (!chosen) return std::nullopt;
      pick = static_cast<int>(*chosen);
    }
    p.owner[pick] = slot;
    n.chunk = pick;
  }
}

void Swarm::FillPipeline(Peer& p, int slot) {
  Neighbor& n = p.neighbors[slot];
  while (n.unchoked_by_remote && n.outstanding < config_.pipeline_depth) {
    const auto ref = NextBlock(p, slot);
    if (!ref) return;
    p.blocks[ref->chunk][ref->block] = BlockState::kRequested;
    ++p.progress[ref->chunk];
    ++n.outstanding;
    SendControl(p, slot, ControlType::kRequest, *ref);
  }
}

void Swarm::FillAll(Peer& p) {
  for (int s = 0; s < static_cast<int>(p.neighbors.size()); ++s) {
    if (p.neighbors[s].unchoked_by_remote) FillPipeline(p, s);
  }
}

void Swarm::Unchoke(Peer& p, int slot) {
  Neighbor& n = p.neighbors[slot];
  if (n.unchoking) return;
  n.unchoking = true;
  ++p.unchoked;
  SendControl(p, slot, ControlType::kUnchoke);
}

void Swarm::Choke(Peer& p, int slot) {
  Neighbor& n = p.neighbors[slot];
  if (!n.unchoking) return;
  n.unchoking = false;
  --p.unchoked;
  if (p.optimistic == static_cast<std::uint32_t>(slot)) p.optimistic.reset();
  SendControl(p, slot, ControlType::kChoke);
}

void Swarm::RefillSlots(Peer& p) {
  std::vector<int> waiting;
  for (int s = 0; s < static_cast<int>(p.neighbors.size()); ++s) {
    const Neighbor& n = p.neighbors[s];
    if (n.connected && n.offer > 0 && !n.unchoking) waiting.push_back(s);
  }
  p.choker.Shuffle(std::span<int>(waiting));
  for (int s : waiting) {
    if (p.unchoked >= config_.upload_slots) break;
    Unchoke(p, s);
  }
}

void Swarm::Rechoke(std::uint32_t id) {
  Peer& p = peers_[id];
  const int period = static_cast<int>(config_.optimistic_interval / config_.rechoke_interval);
  const bool rotate = ++p.rechoke_ticks % period == 0;

  const bool reciprocate = !Complete(p);
  std::vector<ChokeCandidate> interested;
  for (int s = 0; s < static_cast<int>(p.neighbors.size()); ++s) {
    const Neighbor& n = p.neighbors[s];
    if (!n.connected || n.offer == 0) continue;
    const auto& window = reciprocate ? n.received : n.sent;
    interested.push_back({static_cast<std::uint32_t>(s), window[0] + window[1]});
  }
  const UnchokeDecision decision =
      SelectUnchoked(interested, config_.upload_slots, p.optimistic, rotate, p.choker);
  std::vector<std::uint8_t> keep(p.neighbors.size(), 0);
  for (auto s : decision.regular) keep[s] = 1;
  if (decision.optimistic) keep[*decision.optimistic] = 1;
  for (int s = 0; s < static_cast<int>(p.neighbors.size()); ++s) {
    if (!keep[s]) Choke(p, s);
  }
  for (int s = 0; s < static_cast<int>(p.neighbors.size()); ++s) {
    if (keep[s]) Unchoke(p, s);
  }
  p.optimistic = decision.optimistic;

  const int buckets = static_cast<int>(config_.rate_window / config_.rechoke_interval);
  for (Neighbor& n : p.neighbors) {
    // Windows longer than two periods are folded into the older bucket.
    n.received[1] = buckets > 1 ? n.received[0] : 0;
    n.sent[1] = buckets > 1 ? n.sent[0] : 0;
    n.received[0] = 0;
    n.sent[0] = 0;
  }

  const bool next_rotates = (p.rechoke_ticks + 1) % period == 0;
  sim_.ScheduleIn(config_.rechoke_interval,
                  next_rotates ? EventKind::kOptimisticUnchokeTick : EventKind::kRechokeTick,
                  [this, id] { Rechoke(id); }, /*housekeeping=*/true);
}

void Swarm::ReportDeadlock(SimTime at, bool time_limit) {
  const auto cut = CutOff(layout_);
  std::ostringstream what;
  what << (time_limit ? "time limit reached" : "swarm stalled") << " at "
       << ToSeconds(at) << " s with " << leechers_left_ << " of "
       << config_.leecher_count() << " leechers incomplete";
  if (!cut.empty()) {
    std::map<int, int> by_disposition;
    for (auto id : cut) ++by_disposition[layout_.disposition[id].value()];
    what << "; disposition graph leaves " << cut.size() << " leechers without a path to a seed (";
    bool first = true;
    for (const auto& [d, count] : by_disposition) {
      what << (first ? "" : ", ") << count << " x disposition " << d;
      first = false;
    }
    what << ")";
  } else {
    what << "; disposition graph is connected";
  }
  throw SwarmDeadlock(at, what.str(), leechers_left_, static_cast<int>(cut.size()));
}

RunRecord Swarm::Run() {
  const SimTime limit = config_.time_limit;
  bool timed_out = false;
  try {
    sim_.RunUntil([&] {
      if (sim_.Now() > limit) timed_out = true;
      return leechers_left_ == 0 || timed_out;
    });
  } catch (const DeadlockError& e) {
    ReportDeadlock(e.at(), false);
  }
  if (timed_out) ReportDeadlock(sim_.Now(), true);

  RunRecord record;
  record.scenario = config_.name;
  record.seed = seed_;
  record.config_digest = ConfigDigest(config_);
  record.end_time = sim_.Now();
  for (Peer& p : peers_) {
    PeerRecord r;
    r.id = p.id;
    r.initial_seed = p.initial_seed;
    r.class_name = p.initial_seed ? "seed" : config_.classes[p.class_index].name;
    r.disposition = p.disposition.value();
    r.uplink_bps = p.uplink->capacity_bps();
    r.completion = p.completion;
    r.dequeue_log = p.uplink->dequeue_log();
    r.link = p.uplink->counters();
    r.link_conserved = p.uplink->Conserves();
    r.occupancy_integral = p.uplink->OccupancyIntegral(sim_.Now());
    r.uploaded_bytes = p.uploaded;
    r.downloaded_bytes = p.downloaded;
    r.duplicate_blocks = p.duplicates;
    record.peers.push_back(std::move(r));
  }
  for (const Connection& c : connections_) {
    record.connections.push_back(
        {c.a, c.b, c.protocol,
         UtpFeasible(layout_.disposition[c.a], layout_.disposition[c.b]), c.data_bytes});
  }
  record.data_bytes = data_bytes_;
  record.wire_bytes = wire_bytes_;
  record.integrity_violations = integrity_violations_;
  record.control_retries = control_retries_;
  record.events = sim_.stats();
  return record;
}

}  // namespace

RunRecord RunSwarm(const ScenarioConfig& config, std::uint64_t seed) {
  Validate(config);
  Swarm swarm(config, seed);
  return swarm.Run();
}

std::vector<std::uint32_t> PeersCutOffFromSeeds(const ScenarioConfig& config) {
  return CutOff(LayOut(config));
}

}  // namespace swarmsim
