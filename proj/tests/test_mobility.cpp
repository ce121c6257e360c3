#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "support.hpp"
#include "vanet/mobility.hpp"

using namespace vanet;
using namespace vanet::mobility;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Cross {
  road::RoadNetwork net = road::load_network(test::cross_prefix());
  RouteFile routes = load_routes(test::kFixtures + "/cross/cross.rou.xml");
  TurnPolicy policy = parse_turns(slurp(test::kFixtures + "/cross/cross.turns.xml"), net);
};

std::size_t index_of(const MobilityWorld& w, const std::string& id) {
  for (std::size_t i = 0; i < w.vehicles().size(); ++i) {
    if (w.vehicles()[i].state.id == id) return i;
  }
  FAIL("no vehicle " << id);
  return 0;
}

}  // namespace

TEST_CASE("built-in vehicle classes") {
  const auto& t = builtin_types();
  REQUIRE(t.size() == 4);
  CHECK(t[0].id == "CarA");
  CHECK(t[0].accel == 3.0);
  CHECK(t[0].decel == 6.0);
  CHECK(t[1].length == 7.5);
  CHECK(t[2].max_speed == 20.0);
  CHECK(t[3].max_speed == 10.0);
  CHECK(t[3].decel == 5.0);
}

TEST_CASE("safe speed") {
  // -b*tau + sqrt((b*tau)^2 + vl^2 + 2*b*g) with b=6, tau=1, vl=5, g=10
  CHECK(safe_speed(10, 5, 6, 1) == doctest::Approx(-6 + std::sqrt(181.0)).epsilon(1e-12));
  CHECK(safe_speed(0, 0, 6, 1) == 0.0);
  CHECK(safe_speed(1e6, 0, 6, 1) > 100.0);
}

TEST_CASE("step_vehicle respects acceleration, speed limits and stop lines") {
  const auto& car = builtin_types()[0];
  MobilityConfig cfg;
  VehicleState s;
  StepContext free_road;
  auto n = step_vehicle(s, car, free_road, cfg, 0.1);
  CHECK(n.speed == doctest::Approx(0.3));
  CHECK(n.pos == doctest::Approx(0.03));

  s.speed = 29.9;
  n = step_vehicle(s, car, free_road, cfg, 0.1);
  CHECK(n.speed == doctest::Approx(30.0));
  StepContext slow;
  slow.lane_speed_limit = 13.89;
  n = step_vehicle(s, car, slow, cfg, 0.1);
  CHECK(n.speed == doctest::Approx(29.9 - 0.6));  // can only shed b*dt per step

  s.speed = 10.0;
  StepContext stop;
  stop.stop_line = 1.0;
  n = step_vehicle(s, car, stop, cfg, 0.1);
  CHECK(n.speed == doctest::Approx(9.4));

  // Standing still in front of the line stays still.
  s.speed = 0.0;
  stop.stop_line = cfg.min_gap;
  n = step_vehicle(s, car, stop, cfg, 0.1);
  CHECK(n.speed == 0.0);

  StepContext follow;
  follow.leader = Leader{cfg.min_gap + 10.0, 5.0, 6.0};
  s.speed = 5.0;
  n = step_vehicle(s, car, follow, cfg, 0.1);
  CHECK(n.speed == doctest::Approx(std::min(5.3, -6 + std::sqrt(181.0))));
}

TEST_CASE("next edge: routes, turn policy and dead ends") {
  Cross c;
  std::mt19937_64 rng(7);
  VehicleState s;
  s.route = 0;  // we: w_c c_e e_c c_w
  s.cursor = 0;
  auto nx = choose_next_edge(s, c.net, c.routes, c.policy, rng);
  CHECK(nx.kind == NextKind::edge);
  CHECK(c.net.edges()[nx.edge].id == "c_e");
  s.cursor = 3;
  CHECK(choose_next_edge(s, c.net, c.routes, c.policy, rng).kind == NextKind::arrival);

  VehicleState p;
  p.edge = *c.net.edge_index("n_c");
  std::map<std::string, int> hits;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) hits[c.net.edges()[choose_next_edge(p, c.net, c.routes, c.policy, rng).edge].id]++;
  CHECK(hits["c_s"] / double(draws) == doctest::Approx(0.5).epsilon(0.05));
  CHECK(hits["c_e"] / double(draws) == doctest::Approx(0.25).epsilon(0.05));
  CHECK(hits["c_w"] / double(draws) == doctest::Approx(0.25).epsilon(0.05));

  // No policy entry: uniform over the outgoing connections.
  p.edge = *c.net.edge_index("w_c");
  hits.clear();
  for (int i = 0; i < draws; ++i) hits[c.net.edges()[choose_next_edge(p, c.net, c.routes, c.policy, rng).edge].id]++;
  CHECK(hits.size() == 3);
  for (const auto& [id, k] : hits) CHECK(k / double(draws) == doctest::Approx(1.0 / 3).epsilon(0.05));

  const auto net = road::parse_network(R"(<nodes><node id="a" x="0" y="0"/><node id="b" x="50" y="0"/></nodes>)",
                                       R"(<edges><edge id="ab" from="a" to="b"/></edges>)", "<connections/>");
  VehicleState d;
  d.edge = 0;
  CHECK(choose_next_edge(d, net, RouteFile{}, TurnPolicy{}, rng).kind == NextKind::dead_end);
}

TEST_CASE("turn tables are validated") {
  Cross c;
  CHECK_THROWS_WITH_AS(parse_turns(R"(<turns><turn from="n_c" to="c_s" probability="0.7"/></turns>)", c.net),
                       doctest::Contains("sum to"), road::NetworkError);
  CHECK_THROWS_WITH_AS(parse_turns(R"(<turns><turn from="n_c" to="c_n" probability="1"/></turns>)", c.net),
                       doctest::Contains("no connection"), road::NetworkError);
  CHECK_THROWS_AS(parse_turns(R"(<turns><turn from="n_c" to="c_s" probability="1.5"/></turns>)", c.net),
                  road::NetworkError);
}

TEST_CASE("route files are validated against the network") {
  Cross c;
  auto bad = c.routes;
  bad.routes[0].edges = {"w_c", "c_w"};  // U-turn through the centre is not connected
  CHECK_THROWS_WITH_AS(validate_routes(bad, c.net), doctest::Contains("route 'we'"), road::NetworkError);
  bad = c.routes;
  bad.vehicles[0].type = "Bus";
  CHECK_THROWS_WITH_AS(validate_routes(bad, c.net), doctest::Contains("unknown type"), road::NetworkError);
  bad = c.routes;
  bad.vehicles[1].id = bad.vehicles[0].id;
  CHECK_THROWS_WITH_AS(validate_routes(bad, c.net), doctest::Contains("duplicate"), road::NetworkError);
  bad = c.routes;
  bad.vehicles[0].depart = -1;
  CHECK_THROWS_AS(validate_routes(bad, c.net), road::NetworkError);
}

TEST_CASE("route files round-trip") {
  Cross c;
  const auto text = serialize_routes(c.routes);
  const auto back = parse_routes(text);
  REQUIRE(back.vehicles.size() == c.routes.vehicles.size());
  CHECK(back.vehicles[1].depart == 1.5);
  CHECK(back.vehicles[4].start_edge == std::optional<std::string>("n_c"));
  CHECK(back.routes[1].edges == c.routes.routes[1].edges);
  CHECK(serialize_routes(back) == text);
}

TEST_CASE("world on the cross fixture stays safe and deterministic") {
  Cross c;
  auto run = [&](bool signals) {
    std::mt19937_64 rng(3);
    MobilityWorld w(c.net, c.routes, c.policy, {}, signals, rng);
    std::string trace;
    for (int k = 0; k <= 2400; ++k) {
      w.step();
      w.append_trace(trace);
    }
    const auto& a = w.audit();
    CHECK(a.vehicle_steps > 1000);
    CHECK(a.gap_violations == 0);
    CHECK(a.red_crossings == 0);
    CHECK(a.accel_violations == 0);
    CHECK(a.decel_violations == 0);
    CHECK(a.speed_limit_violations == 0);
    CHECK(a.arrivals == 4);
    return trace;
  };
  const auto t1 = run(true);
  CHECK(t1 == run(true));
  CHECK(t1 != run(false));
}

TEST_CASE("a red light holds the north-south approach") {
  Cross c;
  std::mt19937_64 r1(1), r2(1);
  MobilityWorld lit(c.net, c.routes, c.policy, {}, true, r1);
  MobilityWorld green(c.net, c.routes, c.policy, {}, false, r2);
  for (int k = 0; k <= 250; ++k) {  // t = 25 s, inside the first (east-west) green
    lit.step();
    green.step();
  }
  const auto v = index_of(lit, "c");
  const auto& held = lit.vehicles()[v].state;
  CHECK(c.net.edges()[held.edge].id == "s_c");
  CHECK(held.speed < 0.5);
  CHECK(200.0 - held.pos < 10.0);
  CHECK(c.net.edges()[green.vehicles()[v].state.edge].id != "s_c");
  CHECK(lit.count_near_signals(50) >= 1);
  CHECK(distance(lit.position(v), {200, 200}) < 10.0);
}

TEST_CASE("departures wait for room on the start lane") {
  Cross c;
  RouteFile rf;
  rf.types = builtin_types();
  rf.routes = {{"r", {"w_c", "c_e"}}};
  for (int i = 0; i < 3; ++i) rf.vehicles.push_back({"v" + std::to_string(i), "CarA", 0.0, "r", std::nullopt, 0});
  std::mt19937_64 rng(1);
  MobilityWorld w(c.net, rf, {}, {}, true, rng);
  w.step();
  CHECK(w.active_count() == 1);
  for (int k = 0; k < 100; ++k) w.step();
  CHECK(w.active_count() == 3);
  CHECK(w.audit().gap_violations == 0);
}
