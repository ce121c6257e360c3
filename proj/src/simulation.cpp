#include "vanet/simulation.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "vanet/event_queue.hpp"
#include "vanet/rng.hpp"
#include "xml_util.hpp"

namespace vanet::sim {

void ScenarioConfig::validate() const {
  if (net.empty()) throw std::invalid_argument("net: network path prefix is required");
  if (routes.empty()) throw std::invalid_argument("routes: route file is required");
  if (!(duration >= 0) || !std::isfinite(duration)) throw std::invalid_argument("duration_s must be >= 0");
  if (!(mobility.timestep > 0 && mobility.tau > 0 && mobility.min_gap > 0)) {
    throw std::invalid_argument("mobility parameters must be positive");
  }
  if (!(near_signal_radius > 0)) throw std::invalid_argument("near_signal_radius_m must be positive");
  if (sense_delay.ns() < 0) throw std::invalid_argument("mac.sense_delay_us must be >= 0");
  phy.validate();
  mac.validate();
  aodv.validate();
  app.validate();
}

net::NetConfig ScenarioConfig::net_config() const {
  net::NetConfig c;
  c.phy = phy;
  c.mac = mac;
  c.aodv = aodv;
  c.sense_delay = sense_delay;
  return c;
}

Inputs load_inputs(const ScenarioConfig& cfg) {
  cfg.validate();
  Inputs in{road::load_network(cfg.net), mobility::load_routes(cfg.routes), {}};
  mobility::validate_routes(in.routes, in.network);
  if (!cfg.turns.empty()) in.policy = mobility::parse_turns(xml::read_file(cfg.turns), in.network, cfg.turns);
  if (cfg.n_vehicles != 0 && cfg.n_vehicles != in.routes.vehicles.size()) {
    throw std::invalid_argument("n_vehicles = " + std::to_string(cfg.n_vehicles) + " but " + cfg.routes +
                                " defines " + std::to_string(in.routes.vehicles.size()) + " vehicles");
  }
  return in;
}

TraceBundle run(const ScenarioConfig& cfg) {
  return run(cfg, load_inputs(cfg));
}

TraceBundle run(const ScenarioConfig& cfg, const Inputs& inputs) {
  TraceBundle out;
  const std::size_t n = inputs.routes.vehicles.size();
  const RngStreams rng(cfg.seed);
  auto turn_rng = rng.stream("turns");
  auto flow_rng = rng.stream("flows");

  engine::EventQueue events;
  mobility::MobilityWorld world(inputs.network, inputs.routes, inputs.policy, cfg.mobility, cfg.signals_enabled,
                                turn_rng);
  net::Network network(events, n, cfg.net_config(), [&world](NodeId v) { return world.position(v); }, rng,
                       &out.event_trace);

  if (cfg.app.flows || n >= 4) out.flows = traffic::select_flows(n, cfg.app, flow_rng);

  const SimTime end = SimTime::from_seconds(cfg.duration);
  const SimTime dt = SimTime::from_seconds(cfg.mobility.timestep);
  if (cfg.record_mobility) out.mobility_trace = "time,vehicle,edge,lane,pos,speed,x,y\n";

  std::uint64_t steps = 0;
  double near_sum = 0.0;
  std::function<void(std::int64_t)> step = [&](std::int64_t k) {
    world.step();
    for (std::size_t v = 0; v < n; ++v) network.set_alive(static_cast<NodeId>(v), world.active(v));
    if (cfg.record_mobility) world.append_trace(out.mobility_trace);
    near_sum += static_cast<double>(world.count_near_signals(cfg.near_signal_radius));
    ++steps;
    const SimTime next = dt * (k + 1);
    if (next <= end) events.schedule(next, engine::EventKind::mobility_step, [&step, k] { step(k + 1); });
  };
  events.schedule(SimTime{}, engine::EventKind::mobility_step, [&step] { step(0); });

  struct FlowState {
    std::vector<SimTime> times;
    std::size_t next = 0;
    std::uint32_t seq = 0;
  };
  std::vector<FlowState> flow_state(out.flows.size());
  std::function<void(std::size_t)> send = [&](std::size_t f) {
    const auto& flow = out.flows[f];
    auto& st = flow_state[f];
    if (network.alive(flow.src)) {
      network.app_send(flow.src, flow.dst, flow.id, st.seq++, traffic::wire_size(flow.packet_size));
    }
    if (++st.next < st.times.size()) {
      events.schedule(st.times[st.next], engine::EventKind::app_send, [&send, f] { send(f); });
    }
  };
  for (std::size_t f = 0; f < out.flows.size(); ++f) {
    flow_state[f].times = traffic::emit_schedule(out.flows[f], end);
    if (!flow_state[f].times.empty()) {
      events.schedule(flow_state[f].times[0], engine::EventKind::app_send, [&send, f] { send(f); });
    }
  }

  events.run_until(end);
  network.finish();

  out.tally = metrics::tally(out.event_trace, out.flows);
  out.audit = world.audit();
  out.net = network.stats();
  out.mean_near_signals = steps ? near_sum / static_cast<double>(steps) : 0.0;
  out.events = events.dispatched();
  if (!cfg.record_events) {
    out.event_trace.clear();
    out.event_trace.shrink_to_fit();
  }
  return out;
}

std::string counters_csv(std::size_t n_vehicles, std::uint64_t seed, const metrics::CounterSet& c) {
  metrics::RunResult r{n_vehicles, seed, c};
  return metrics::runs_csv(std::span<const metrics::RunResult>(&r, 1));
}

}  // namespace vanet::sim
