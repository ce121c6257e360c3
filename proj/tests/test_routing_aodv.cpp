#include <doctest.h>

#include "support.hpp"
#include "vanet/aodv.hpp"

using namespace vanet;
using namespace vanet::aodv;

namespace {

struct Ids {
  PacketId next = 1000;
  Agent::IdSource source() {
    return [this] { return next++; };
  }
};

Packet data(NodeId src, NodeId dst, std::uint8_t ttl = kDefaultIpTtl) {
  Packet p;
  p.id = 1;
  p.src = src;
  p.dst = dst;
  p.ttl = ttl;
  p.size_bytes = 1028;
  p.payload = DataPayload{};
  return p;
}

template <class T>
std::vector<T> only(const std::vector<Action>& actions) {
  std::vector<T> out;
  for (const auto& a : actions) {
    if (const auto* x = std::get_if<T>(&a)) out.push_back(*x);
  }
  return out;
}

template <class M>
const M& message(const SendAction& s) {
  return std::get<M>(s.packet.payload);
}

SimTime at(double s) { return SimTime::from_seconds(s); }

// Install a route at `agent` the way a received RREP would.
void learn(Agent& agent, NodeId dest, NodeId via, std::uint8_t hops, std::uint32_t seq, SimTime now) {
  Packet p;
  p.src = dest;
  p.dst = agent.id();
  p.payload = RrepMessage{agent.id(), dest, seq, static_cast<std::uint8_t>(hops - 1), 10.0};
  agent.receive(p, via, now);
}

}  // namespace

TEST_CASE("sequence numbers compare circularly") {
  CHECK(seq_newer(5, 3));
  CHECK_FALSE(seq_newer(3, 5));
  CHECK_FALSE(seq_newer(7, 7));
  CHECK(seq_newer(0, 0xFFFFFFFFu));
  CHECK(seq_newer(2, 0xFFFFFFF0u));
  CHECK_FALSE(seq_newer(0xFFFFFFF0u, 2));
}

TEST_CASE("fresher prefers newer sequence numbers, then fewer hops") {
  RouteEntry e;
  e.dest_seq = 10;
  e.hop_count = 3;
  CHECK(fresher(0, 9, e));  // no valid sequence number yet
  e.valid_seq = true;
  CHECK(fresher(11, 9, e));
  CHECK(fresher(10, 2, e));
  CHECK_FALSE(fresher(10, 3, e));
  CHECK_FALSE(fresher(9, 1, e));
  e.dest_seq = 0xFFFFFFFFu;
  CHECK(fresher(0, 9, e));
}

TEST_CASE("configuration helpers follow the standard defaults") {
  const AodvConfig c;
  CHECK(c.net_traversal_time() == doctest::Approx(2.8));
  CHECK(c.path_discovery_time() == doctest::Approx(5.6));
  CHECK(c.ring_traversal_time(1) == doctest::Approx(0.24));
  CHECK(c.my_route_timeout() == doctest::Approx(6.0));
  CHECK(c.delete_period() == doctest::Approx(15.0));
  AodvConfig bad = c;
  bad.buffer_per_dest = 0;
  CHECK_THROWS(bad.validate());
  bad = c;
  bad.ttl_threshold = 0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("expanding ring search, then give up with NRTE drops") {
  Ids ids;
  AodvConfig cfg;
  Agent a(0, cfg, ids.source(), nullptr);
  auto out = a.send_data(data(0, 9), at(0));
  auto sends = only<SendAction>(out);
  REQUIRE(sends.size() == 1);
  CHECK(sends[0].next_hop == kBroadcast);
  CHECK(message<RreqMessage>(sends[0]).ttl == 1);
  CHECK(sends[0].packet.size_bytes == kRreqBytes);
  auto timers = only<TimerAction>(out);
  REQUIRE(timers.size() == 1);
  CHECK(timers[0].at == at(0.24));
  CHECK(a.buffered(9) == 1);
  CHECK(a.discovering(9));

  std::vector<int> ttls;
  std::vector<double> waits;
  SimTime now = timers[0].at;
  std::uint64_t token = timers[0].token;
  std::vector<DropAction> drops;
  for (int guard = 0; guard < 20; ++guard) {
    out = a.on_timer(9, token, now);
    drops = only<DropAction>(out);
    if (!drops.empty()) break;
    ttls.push_back(message<RreqMessage>(only<SendAction>(out).at(0)).ttl);
    const auto t = only<TimerAction>(out).at(0);
    waits.push_back((t.at - now).seconds());
    now = t.at;
    token = t.token;
  }
  CHECK(ttls == std::vector<int>{3, 5, 7, 35, 35, 35});
  REQUIRE(waits.size() == 6);
  CHECK(waits[0] == doctest::Approx(0.40));
  CHECK(waits[3] == doctest::Approx(2.8));
  CHECK(waits[4] == doctest::Approx(5.6));
  CHECK(waits[5] == doctest::Approx(11.2));
  REQUIRE(drops.size() == 1);
  CHECK(drops[0].reason == DropReason::NRTE);
  CHECK_FALSE(a.discovering(9));
  CHECK(a.stats().discoveries_failed == 1);
  // A stale timer token is ignored.
  CHECK(a.on_timer(9, token, now).empty());
}

TEST_CASE("full buffer evicts the oldest packet") {
  Ids ids;
  AodvConfig cfg;
  cfg.buffer_per_dest = 2;
  Agent a(0, cfg, ids.source(), nullptr);
  auto p = data(0, 5);
  for (PacketId k = 1; k <= 3; ++k) {
    p.id = k;
    auto out = a.send_data(p, at(0));
    if (k == 3) {
      auto drops = only<DropAction>(out);
      REQUIRE(drops.size() == 1);
      CHECK(drops[0].packet.id == 1);
      CHECK(drops[0].reason == DropReason::NRTE);
    }
  }
  CHECK(a.buffered(5) == 2);
  auto flushed = only<DropAction>(a.flush(DropReason::END));
  CHECK(flushed.size() == 2);
  CHECK(a.buffered(5) == 0);
}

TEST_CASE("three-node chain: request, reply, release") {
  Ids ids;
  AodvConfig cfg;
  Agent s(0, cfg, ids.source(), nullptr), m(1, cfg, ids.source(), nullptr), d(2, cfg, ids.source(), nullptr);

  auto rreq = only<SendAction>(s.send_data(data(0, 2), at(0))).at(0);
  // The relay ignores a TTL-1 request for someone else.
  CHECK(only<SendAction>(m.receive(rreq.packet, 0, at(0.001))).empty());
  CHECK(m.table().find(0)->hop_count == 1);

  auto t = only<TimerAction>(s.send_data(data(0, 2), at(0.01)));
  CHECK(t.empty());  // discovery already running
  auto retry = s.on_timer(2, 1, at(0.24));
  rreq = only<SendAction>(retry).at(0);
  CHECK(message<RreqMessage>(rreq).ttl == 3);

  auto fw = only<SendAction>(m.receive(rreq.packet, 0, at(0.241)));
  REQUIRE(fw.size() == 1);
  CHECK(fw[0].next_hop == kBroadcast);
  CHECK(message<RreqMessage>(fw[0]).hop_count == 1);
  CHECK(message<RreqMessage>(fw[0]).ttl == 2);
  CHECK_FALSE(fw[0].originated);

  auto rrep = only<SendAction>(d.receive(fw[0].packet, 1, at(0.242)));
  REQUIRE(rrep.size() == 1);
  CHECK(rrep[0].next_hop == 1);
  CHECK(rrep[0].packet.dst == 0);
  CHECK(message<RrepMessage>(rrep[0]).hop_count == 0);
  CHECK(d.table().find(0)->hop_count == 2);
  // A duplicate of the same request is suppressed.
  CHECK(only<SendAction>(d.receive(fw[0].packet, 1, at(0.243))).empty());

  auto back = only<SendAction>(m.receive(rrep[0].packet, 2, at(0.243)));
  REQUIRE(back.size() == 1);
  CHECK(back[0].next_hop == 0);
  CHECK(m.table().find(2)->precursors.contains(0));

  auto released = only<SendAction>(s.receive(back[0].packet, 1, at(0.244)));
  CHECK(released.size() == 2);
  for (const auto& r : released) {
    CHECK(r.packet.is_data());
    CHECK(r.next_hop == 1);
  }
  const auto* route = s.table().find(2);
  REQUIRE(route != nullptr);
  CHECK(route->hop_count == 2);
  CHECK(route->state == RouteState::valid);
  CHECK(s.buffered(2) == 0);

  auto hop = only<SendAction>(m.receive(released[0].packet, 0, at(0.25)));
  REQUIRE(hop.size() == 1);
  CHECK(hop[0].next_hop == 2);
  CHECK(hop[0].packet.ttl == kDefaultIpTtl - 1);
  CHECK(only<DeliverAction>(d.receive(hop[0].packet, 1, at(0.26))).size() == 1);
}

TEST_CASE("stale replies do not replace a fresher route") {
  Ids ids;
  Agent a(0, {}, ids.source(), nullptr);
  learn(a, 7, 3, 4, 10, at(0));
  REQUIRE(a.table().find(7)->dest_seq == 10);
  learn(a, 7, 4, 2, 5, at(0.1));  // shorter but older
  CHECK(a.table().find(7)->next_hop == 3);
  CHECK(a.table().find(7)->hop_count == 4);
  learn(a, 7, 5, 3, 10, at(0.2));  // same seq, fewer hops
  CHECK(a.table().find(7)->next_hop == 5);
  learn(a, 7, 6, 6, 11, at(0.3));  // newer wins despite more hops
  CHECK(a.table().find(7)->next_hop == 6);
  CHECK(a.table().find(7)->hop_count == 6);
}

TEST_CASE("intermediate node answers from a fresh enough route") {
  Ids ids;
  Agent m(1, {}, ids.source(), nullptr);
  learn(m, 9, 2, 3, 20, at(0));
  Packet p;
  p.src = 0;
  p.dst = kBroadcast;
  p.ttl = 5;
  p.payload = RreqMessage{0, 1, 9, 18, true, 1, 0, 5};
  auto out = only<SendAction>(m.receive(p, 0, at(0.1)));
  REQUIRE(out.size() == 1);
  CHECK(out[0].packet.dst == 0);
  CHECK(message<RrepMessage>(out[0]).dest_seq == 20);
  CHECK(message<RrepMessage>(out[0]).hop_count == 3);

  // A request for a newer number than known is forwarded instead.
  p.payload = RreqMessage{0, 2, 9, 21, true, 2, 0, 5};
  out = only<SendAction>(m.receive(p, 0, at(0.2)));
  REQUIRE(out.size() == 1);
  CHECK(out[0].next_hop == kBroadcast);
}

TEST_CASE("link break invalidates routes and reports to precursors") {
  Ids ids;
  Agent m(1, {}, ids.source(), nullptr);
  learn(m, 9, 2, 3, 20, at(0));
  learn(m, 8, 2, 2, 4, at(0));
  learn(m, 7, 3, 2, 4, at(0));
  m.table().find(9)->precursors.insert(0);
  auto out = only<SendAction>(m.handle_link_break(2, at(1)));
  CHECK(m.table().find(9)->state == RouteState::invalid);
  CHECK(m.table().find(9)->dest_seq == 21);
  CHECK(m.table().find(8)->state == RouteState::invalid);
  CHECK(m.table().find(7)->state == RouteState::valid);
  REQUIRE(out.size() == 1);
  const auto& rerr = message<RerrMessage>(out[0]);
  REQUIRE(rerr.unreachable.size() == 1);  // only 9 had precursors
  CHECK(rerr.unreachable[0] == std::make_pair(NodeId{9}, std::uint32_t{21}));
  CHECK(out[0].packet.size_bytes == kRerrBaseBytes + kRerrPerDestBytes);

  // Upstream, the error invalidates the route through the reporting neighbor.
  Agent s(0, {}, ids.source(), nullptr);
  learn(s, 9, 1, 4, 20, at(0));
  learn(s, 6, 5, 2, 1, at(0));
  CHECK(only<SendAction>(s.receive(out[0].packet, 1, at(1.1))).empty());
  CHECK(s.table().find(9)->state == RouteState::invalid);
  CHECK(s.table().find(9)->dest_seq == 21);
  CHECK(s.table().find(6)->state == RouteState::valid);
  // The same error from a node that is not our next hop changes nothing.
  learn(s, 9, 4, 4, 30, at(1.2));
  s.receive(out[0].packet, 1, at(1.3));
  CHECK(s.table().find(9)->state == RouteState::valid);
}

TEST_CASE("forwarding without a route or with an expired TTL") {
  Ids ids;
  Agent m(1, {}, ids.source(), nullptr);
  auto out = m.receive(data(0, 9), 0, at(0));
  auto drops = only<DropAction>(out);
  REQUIRE(drops.size() == 1);
  CHECK(drops[0].reason == DropReason::NRTE);
  CHECK(only<SendAction>(out).size() == 1);  // RERR
  learn(m, 9, 2, 2, 1, at(0));
  drops = only<DropAction>(m.receive(data(0, 9, 1), 0, at(0.1)));
  REQUIRE(drops.size() == 1);
  CHECK(drops[0].reason == DropReason::TTL);
}

TEST_CASE("routes expire after the active route timeout") {
  Ids ids;
  Agent a(0, {}, ids.source(), nullptr);
  learn(a, 5, 1, 2, 3, at(0));
  // lifetime from the reply is 10 s
  CHECK(a.table().active(5, at(9.9), 15.0) != nullptr);
  CHECK(a.table().active(5, at(10.0), 15.0) == nullptr);
  CHECK(a.table().find(5)->state == RouteState::invalid);
}

namespace {

void check_fixture(const std::vector<Point2D>& pos, NodeId src, std::uint64_t seed) {
  test::StaticNet s(pos, seed);
  const auto bfs = test::bfs_hops(pos, src, 250.0);
  for (NodeId dst = 0; dst < pos.size(); ++dst) {
    if (dst == src) continue;
    s.send(src, dst, dst);
    s.run_for(1.0);
    CAPTURE(dst);
    const auto* r = s.net->agent(src).table().find(dst);
    REQUIRE(r != nullptr);
    CHECK(r->state == aodv::RouteState::valid);
    CHECK(r->hop_count == bfs[dst]);
    CHECK(s.delivered_to(dst) == 1);
  }
}

}  // namespace

TEST_CASE("discovered hop counts equal BFS shortest paths") {
  SUBCASE("line") { check_fixture(test::line_fixture(6, 200), 0, 1); }
  SUBCASE("ring") { check_fixture(test::ring_fixture(8, 200), 0, 2); }
  SUBCASE("grid") { check_fixture(test::grid_fixture(4, 2, 200), 0, 3); }
  SUBCASE("grid from the middle") { check_fixture(test::grid_fixture(4, 2, 200), 5, 4); }
}

TEST_CASE("losing a relay triggers RERR and rediscovery around the ring") {
  const auto pos = test::ring_fixture(8, 200);
  test::StaticNet s(pos, 5);
  s.send(0, 3);
  s.run_for(1.0);
  REQUIRE(s.delivered_to(3) == 1);
  REQUIRE(s.net->agent(0).table().find(3)->hop_count == 3);
  const NodeId relay = s.net->agent(1).table().find(3)->next_hop;
  CHECK(relay == 2);

  s.net->set_alive(2, false);
  s.send(0, 3);
  s.run_for(1.0);
  CHECK(s.net->agent(1).stats().rerr_sent >= 1);
  CHECK(s.net->agent(0).table().find(3)->state == aodv::RouteState::invalid);

  s.send(0, 3);
  s.run_for(2.0);
  CHECK(s.delivered_to(3) == 2);
  std::vector<bool> present(pos.size(), true);
  present[2] = false;
  const auto* r = s.net->agent(0).table().find(3);
  CHECK(r->state == aodv::RouteState::valid);
  CHECK(r->hop_count == test::bfs_hops(pos, 0, 250.0, present)[3]);
  CHECK(r->hop_count == 5);
}
