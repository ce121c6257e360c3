#include <doctest.h>

#include <set>
#include <stdexcept>

#include "vanet/traffic.hpp"

using namespace vanet;
using namespace vanet::traffic;

TEST_CASE("CBR interval and wire size") {
  CHECK(cbr_interval(64000, 1000) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(cbr_interval(8000, 512) == doctest::Approx(0.512).epsilon(1e-15));
  CHECK(wire_size(1000) == 1028);
  CHECK_THROWS_AS(cbr_interval(0, 1000), std::invalid_argument);
  CHECK_THROWS_AS(cbr_interval(64000, 0), std::invalid_argument);
}

TEST_CASE("random flows: n/4 flows over distinct endpoints, staggered starts") {
  AppConfig cfg;
  for (std::size_t n : {4u, 10u, 40u, 70u}) {
    std::mt19937_64 rng(n);
    const auto flows = select_flows(n, cfg, rng);
    CHECK(flows.size() == n / 4);
    std::set<NodeId> used;
    for (const auto& f : flows) {
      CHECK(f.src < n);
      CHECK(f.dst < n);
      CHECK(used.insert(f.src).second);
      CHECK(used.insert(f.dst).second);
      CHECK(f.start >= 60.0);
      CHECK(f.start < 60.125);
      CHECK(f.packet_size == 1000);
    }
  }
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(select_flows(3, cfg, rng), std::invalid_argument);
}

TEST_CASE("same seed, same flows") {
  AppConfig cfg;
  std::mt19937_64 a(42), b(42), c(43);
  const auto fa = select_flows(40, cfg, a);
  const auto fb = select_flows(40, cfg, b);
  const auto fc = select_flows(40, cfg, c);
  REQUIRE(fa.size() == fb.size());
  bool differs = false;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    CHECK(fa[i].src == fb[i].src);
    CHECK(fa[i].dst == fb[i].dst);
    CHECK(fa[i].start == fb[i].start);
    differs |= fa[i].src != fc[i].src || fa[i].dst != fc[i].dst;
  }
  CHECK(differs);
}

TEST_CASE("explicit flows are validated") {
  AppConfig cfg;
  cfg.flows = std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {2, 3}};
  CHECK_NOTHROW(cfg.validate());
  std::mt19937_64 rng(1);
  const auto flows = select_flows(4, cfg, rng);
  REQUIRE(flows.size() == 2);
  CHECK(flows[1].src == 2);
  CHECK_THROWS_AS(select_flows(3, cfg, rng), std::invalid_argument);
  cfg.flows = std::vector<std::pair<NodeId, NodeId>>{{0, 0}};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.flows = std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {1, 2}};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.flows.reset();
  cfg.rate_bps = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("emission schedule") {
  FlowSpec f;
  f.start = 60.0;
  // [60, 200) at 0.125 s: 140 / 0.125 = 1120 sends, the last at 199.875.
  auto t = emit_schedule(f, SimTime::from_seconds(200));
  REQUIRE(t.size() == 1120);
  CHECK(t.front() == SimTime::from_seconds(60));
  CHECK(t.back() == SimTime::from_seconds(199.875));
  for (std::size_t i = 1; i < t.size(); ++i) CHECK((t[i] - t[i - 1]).ns() == 125000000);

  f.start = 60.05;
  CHECK(emit_schedule(f, SimTime::from_seconds(200)).size() == 1120);
  f.max_packets = 10;
  CHECK(emit_schedule(f, SimTime::from_seconds(200)).size() == 10);
  f.max_packets = 100;
  CHECK(emit_schedule(f, SimTime::from_seconds(30)).empty());
}
