#include <doctest.h>

#include <set>

#include "support.hpp"
#include "vanet/event_queue.hpp"
#include "vanet/rng.hpp"
#include "vanet/simulation.hpp"

using namespace vanet;

TEST_CASE("simulation time is exact") {
  CHECK(SimTime::from_seconds(0.125).ns() == 125000000);
  CHECK(SimTime::from_us(20).ns() == 20000);
  CHECK((SimTime::from_seconds(1.5) + SimTime::from_ns(1)).ns() == 1500000001);
  CHECK(SimTime::from_seconds(0.1) * 3 == SimTime::from_seconds(0.3));
  CHECK(SimTime::from_seconds(2.0).seconds() == 2.0);
}

TEST_CASE("events run in time order, ties in scheduling order") {
  engine::EventQueue q;
  std::vector<int> order;
  q.schedule(SimTime::from_seconds(2), engine::EventKind::app_send, [&] { order.push_back(3); });
  q.schedule(SimTime::from_seconds(1), engine::EventKind::app_send, [&] { order.push_back(1); });
  q.schedule(SimTime::from_seconds(1), engine::EventKind::mac_timer, [&] {
    order.push_back(2);
    q.schedule(q.now(), engine::EventKind::mac_timer, [&] { order.push_back(21); });
  });
  q.schedule(SimTime::from_seconds(5), engine::EventKind::app_send, [&] { order.push_back(5); });
  q.run_until(SimTime::from_seconds(3));
  CHECK(order == std::vector<int>{1, 2, 21, 3});
  CHECK(q.now() == SimTime::from_seconds(3));
  CHECK(q.size() == 1);
  CHECK(q.dispatched() == 4);
  CHECK_THROWS_AS(q.schedule(SimTime::from_seconds(2), engine::EventKind::app_send, [] {}), engine::SchedulingError);
  CHECK(q.dispatch_next());
  CHECK_FALSE(q.dispatch_next());
}

TEST_CASE("named random streams are reproducible and independent") {
  const RngStreams r(2);
  auto a = r.stream("mac");
  auto b = r.stream("mac");
  auto c = r.stream("routing");
  auto d = RngStreams(4).stream("mac");
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
  // Drawing from one stream does not shift another.
  auto e = r.stream("routing");
  for (int i = 0; i < 100; ++i) a();
  auto f = r.stream("routing");
  CHECK(e() == f());
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
}

namespace {

sim::ScenarioConfig cross_config() {
  sim::ScenarioConfig cfg;
  cfg.net = test::cross_prefix();
  cfg.routes = test::kFixtures + "/cross/cross.rou.xml";
  cfg.turns = test::kFixtures + "/cross/cross.turns.xml";
  cfg.duration = 40;
  cfg.app.start_s = 5;
  cfg.app.flows = std::vector<std::pair<NodeId, NodeId>>{{0, 2}, {1, 3}};
  return cfg;
}

}  // namespace

TEST_CASE("one run: traces, conservation and halting") {
  const auto cfg = cross_config();
  const auto out = sim::run(cfg);
  CHECK(out.flows.size() == 2);
  CHECK(out.tally.conserved());
  CHECK(out.tally.totals.ps > 0);
  CHECK(out.tally.totals.pr > 0);
  CHECK(out.tally.totals.pl == out.tally.totals.ps - out.tally.totals.pr);
  CHECK(out.audit.vehicle_steps > 0);
  CHECK(out.audit.gap_violations == 0);
  CHECK(out.audit.red_crossings == 0);
  CHECK(out.mobility_trace.rfind("time,vehicle,edge,lane,pos,speed,x,y\n", 0) == 0);
  // Nothing is logged after the end of the run.
  const auto last = out.event_trace.substr(out.event_trace.rfind('\n', out.event_trace.size() - 2) + 1);
  CHECK(std::stod(last) <= 40.0);
  const auto mob_last = out.mobility_trace.substr(out.mobility_trace.rfind('\n', out.mobility_trace.size() - 2) + 1);
  CHECK(std::stod(mob_last) == doctest::Approx(40.0));
}

TEST_CASE("identical scenarios give byte-identical bundles") {
  const auto cfg = cross_config();
  const auto a = sim::run(cfg);
  const auto b = sim::run(cfg);
  CHECK(a.mobility_trace == b.mobility_trace);
  CHECK(a.event_trace == b.event_trace);
  CHECK(sim::counters_csv(5, cfg.seed, a.tally.totals) == sim::counters_csv(5, cfg.seed, b.tally.totals));
  auto other = cfg;
  other.seed = 3;
  CHECK(sim::run(other).event_trace != a.event_trace);
}

TEST_CASE("input cross-checks") {
  auto cfg = cross_config();
  cfg.n_vehicles = 6;
  CHECK_THROWS_WITH(sim::load_inputs(cfg), doctest::Contains("defines 5 vehicles"));
  cfg = cross_config();
  cfg.app.flows = std::vector<std::pair<NodeId, NodeId>>{{0, 9}};
  CHECK_THROWS(sim::run(cfg));
  cfg = cross_config();
  cfg.duration = -1;
  CHECK_THROWS(cfg.validate());
  cfg = cross_config();
  cfg.routes = test::kFixtures + "/cross/missing.rou.xml";
  CHECK_THROWS(sim::load_inputs(cfg));
}

TEST_CASE("sends from absent vehicles are not counted") {
  auto cfg = cross_config();
  // Vehicle 3 (CarD) departs at 2 s, so with an early start its first sends are skipped.
  cfg.app.start_s = 0;
  cfg.app.flows = std::vector<std::pair<NodeId, NodeId>>{{3, 0}};
  const auto out = sim::run(cfg);
  CHECK(out.tally.totals.ps < 40 * 8);
  CHECK(out.tally.totals.ps >= 30 * 8);
  CHECK(out.tally.conserved());
}

TEST_CASE("counter CSV row") {
  metrics::CounterSet c;
  c.ps = 10;
  c.pr = 7;
  c.rd = 1;
  c.pl = 3;
  CHECK(sim::counters_csv(20, 4, c) == "n_vehicles,seed,ps,pr,rd,pl\n20,4,10,7,1,3\n");
}
