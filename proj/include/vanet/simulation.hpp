#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vanet/aodv.hpp"
#include "vanet/mac.hpp"
#include "vanet/metrics.hpp"
#include "vanet/mobility.hpp"
#include "vanet/network.hpp"
#include "vanet/phy.hpp"
#include "vanet/road_network.hpp"
#include "vanet/traffic.hpp"

namespace vanet::sim {

struct ScenarioConfig {
  std::string net;     // path prefix of the .nod/.edg/.con[/.sig].xml set
  std::string routes;  // route file
  std::string turns;   // optional turn table
  std::size_t n_vehicles = 0;  // 0: whatever the route file holds
  std::uint64_t seed = 2;
  double duration = 200.0;
  bool signals_enabled = true;
  double near_signal_radius = 50.0;

  mobility::MobilityConfig mobility;
  phy::PhyConfig phy;
  mac::MacConfig mac;
  aodv::AodvConfig aodv;
  traffic::AppConfig app;
  SimTime sense_delay = SimTime::from_us(1);

  bool record_mobility = true;
  bool record_events = true;

  void validate() const;
  net::NetConfig net_config() const;
};

struct Inputs {
  road::RoadNetwork network;
  mobility::RouteFile routes;
  mobility::TurnPolicy policy;
};

/// Loads and cross-validates the files a scenario names.
Inputs load_inputs(const ScenarioConfig& cfg);

struct TraceBundle {
  std::string mobility_trace;  // CSV time,vehicle,edge,lane,pos,speed,x,y
  std::string event_trace;
  std::vector<traffic::FlowSpec> flows;
  metrics::Tally tally;
  mobility::SafetyAudit audit;
  net::NetStats net;
  double mean_near_signals = 0.0;  // time-averaged vehicles near signalized nodes
  std::uint64_t events = 0;
};

/// Runs one scenario to `duration`. Inputs must already be validated against cfg.
TraceBundle run(const ScenarioConfig& cfg, const Inputs& inputs);
TraceBundle run(const ScenarioConfig& cfg);

/// `n_vehicles,seed,ps,pr,rd,pl` plus one row.
std::string counters_csv(std::size_t n_vehicles, std::uint64_t seed, const metrics::CounterSet& c);

}  // namespace vanet::sim
