#include <doctest.h>

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <vector>

#include "swarmsim/choker.h"
#include "swarmsim/disposition.h"
#include "swarmsim/piece_picker.h"
#include "swarmsim/rng.h"

using namespace swarmsim;

namespace {

// Bit-level re-derivation: a transport works when one side may open it and
// the other may accept it.
std::optional<Protocol> Oracle(int a, int b) {
  auto opens = [](int from, int to, int out_bit, int in_bit) {
    return (from & out_bit) && (to & in_bit);
  };
  const bool utp = opens(a, b, 2, 8) || opens(b, a, 2, 8);
  const bool tcp = opens(a, b, 1, 4) || opens(b, a, 1, 4);
  if (utp) return Protocol::kUtp;
  if (tcp) return Protocol::kTcp;
  return std::nullopt;
}

}  // namespace

TEST_CASE("negotiation matches the bit-level oracle on every pair") {
  for (int a = 0; a < 32; ++a) {
    for (int b = 0; b < 32; ++b) {
      CAPTURE(a);
      CAPTURE(b);
      const TransportDisposition da(a), db(b);
      const auto got = NegotiateConnection(da, db);
      CHECK(got == Oracle(a, b));
      CHECK(got == NegotiateConnection(db, da));
      CHECK(UtpFeasible(da, db) == UtpFeasible(db, da));
      if (got == Protocol::kTcp) CHECK_FALSE(UtpFeasible(da, db));
    }
  }
}

TEST_CASE("negotiation reference cases") {
  using D = TransportDisposition;
  CHECK(NegotiateConnection(D(13), D(14)) == Protocol::kUtp);
  CHECK(NegotiateConnection(D(13), D(13)) == Protocol::kTcp);
  CHECK(NegotiateConnection(D(5), D(31)) == Protocol::kTcp);
  CHECK(NegotiateConnection(D(31), D(31)) == Protocol::kUtp);
  CHECK(NegotiateConnection(D(10), D(31)) == Protocol::kUtp);
  CHECK(NegotiateConnection(D(5), D(10)) == std::nullopt);
  CHECK(NegotiateConnection(D(0), D(31)) == std::nullopt);
}

TEST_CASE("disposition range and the racing rule") {
  CHECK_THROWS_AS(TransportDisposition(32), std::out_of_range);
  CHECK_THROWS_AS(TransportDisposition(-1), std::out_of_range);
  using D = TransportDisposition;
  CHECK(HandshakesRace(D(31), D(31)));
  CHECK(HandshakesRace(D(31), D(14)));
  CHECK_FALSE(HandshakesRace(D(10), D(31)));
  CHECK_FALSE(HandshakesRace(D(5), D(31)));
  CHECK_FALSE(HandshakesRace(D(13), D(14)));
  // The opener can actually send the opening handshake.
  for (int a = 0; a < 32; ++a) {
    for (int b = 0; b < 32; ++b) {
      const D da(a), db(b);
      if (const auto p = NegotiateConnection(da, db)) {
        const bool a_opens = FirstOpens(da, db, *p);
        const D& opener = a_opens ? da : db;
        const D& other = a_opens ? db : da;
        if (*p == Protocol::kUtp) {
          CHECK((opener.attempts_utp() && other.accepts_utp()));
        } else {
          CHECK((opener.attempts_tcp() && other.accepts_tcp()));
        }
      }
    }
  }
}

TEST_CASE("picker returns nothing when the neighbor has nothing new") {
  RngStream rng(1);
  const std::vector<std::uint8_t> held{1, 1, 0, 0};
  const std::vector<std::uint8_t> in_flight{0, 0, 1, 0};
  const std::vector<std::uint8_t> neighbor{1, 0, 1, 0};
  const std::vector<int> avail{2, 1, 2, 1};
  CHECK_FALSE(SelectNextChunk(held, in_flight, neighbor, avail, rng).has_value());
}

TEST_CASE("picker takes the rarest chunk and splits ties evenly") {
  RngStream rng(2);
  const std::vector<std::uint8_t> none(3, 0);
  const std::vector<std::uint8_t> all(3, 1);
  const std::vector<int> avail{3, 1, 1};
  std::array<int, 3> counts{};
  constexpr int kTrials = 10000;
  for (int i = 0; i < kTrials; ++i) {
    const auto pick = SelectNextChunk(none, none, all, avail, rng);
    REQUIRE(pick.has_value());
    ++counts[*pick];
  }
  CHECK(counts[0] == 0);
  const double share = static_cast<double>(counts[1]) / kTrials;
  CHECK(share >= 0.48);
  CHECK(share <= 0.52);
}

TEST_CASE("picker agrees with a brute-force rarest set") {
  RngStream rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.UniformBelow(40);
    std::vector<std::uint8_t> held(n), flight(n), has(n);
    std::vector<int> avail(n);
    for (std::size_t c = 0; c < n; ++c) {
      held[c] = rng.Bernoulli(0.3);
      flight[c] = rng.Bernoulli(0.2);
      has[c] = rng.Bernoulli(0.6);
      avail[c] = static_cast<int>(rng.UniformBelow(6));
    }
    int best = 1 << 30;
    std::set<std::uint32_t> rarest;
    for (std::uint32_t c = 0; c < n; ++c) {
      if (held[c] || flight[c] || !has[c]) continue;
      if (avail[c] < best) {
        best = avail[c];
        rarest.clear();
      }
      if (avail[c] == best) rarest.insert(c);
    }
    const auto pick = SelectNextChunk(held, flight, has, avail, rng);
    if (rarest.empty()) {
      CHECK_FALSE(pick.has_value());
    } else {
      REQUIRE(pick.has_value());
      CHECK(rarest.count(*pick) == 1);
    }
  }
}

TEST_CASE("choker unchokes everyone when candidates fit the slots") {
  RngStream rng(4);
  const std::vector<ChokeCandidate> c{{7, 10}, {3, 0}, {9, 99}};
  const auto d = SelectUnchoked(c, 4, std::nullopt, false, rng);
  CHECK(std::set<std::uint32_t>(d.regular.begin(), d.regular.end()) ==
        std::set<std::uint32_t>{3, 7, 9});
  CHECK_FALSE(d.optimistic.has_value());
}

TEST_CASE("choker fills slots-1 by rate plus one optimistic") {
  RngStream rng(5);
  const std::vector<ChokeCandidate> c{{0, 5}, {1, 50}, {2, 40}, {3, 1}, {4, 30}, {5, 2}};
  const auto d = SelectUnchoked(c, 4, std::nullopt, false, rng);
  CHECK(std::set<std::uint32_t>(d.regular.begin(), d.regular.end()) ==
        std::set<std::uint32_t>{1, 2, 4});
  REQUIRE(d.optimistic.has_value());
  CHECK(std::set<std::uint32_t>{0, 3, 5}.count(*d.optimistic) == 1);

  // The holder keeps the optimistic slot until rotation.
  const auto kept = SelectUnchoked(c, 4, std::uint32_t{3}, false, rng);
  CHECK(kept.optimistic == std::uint32_t{3});
  std::set<std::uint32_t> seen;
  for (int i = 0; i < 200; ++i) seen.insert(*SelectUnchoked(c, 4, std::uint32_t{3}, true, rng).optimistic);
  CHECK(seen == std::set<std::uint32_t>{0, 3, 5});
}

TEST_CASE("choker is deterministic for a given stream") {
  std::vector<ChokeCandidate> c;
  for (std::uint32_t k = 0; k < 12; ++k) c.push_back({k, k % 3});
  RngStream a = RngStream::Substream(9, "choker/1");
  RngStream b = RngStream::Substream(9, "choker/1");
  for (int i = 0; i < 50; ++i) {
    const auto x = SelectUnchoked(c, 4, std::nullopt, true, a);
    const auto y = SelectUnchoked(c, 4, std::nullopt, true, b);
    CHECK(x.regular == y.regular);
    CHECK(x.optimistic == y.optimistic);
  }
}
