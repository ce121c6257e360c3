#include "vanet/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace vanet::traffic {

void AppConfig::validate() const {
  if (packet_size == 0) throw std::invalid_argument("app.packet_size_b must be positive");
  if (!(rate_bps > 0)) throw std::invalid_argument("app.rate_bps must be positive");
  if (!(start_s >= 0)) throw std::invalid_argument("app.start_s must be >= 0");
  if (flows) {
    std::set<NodeId> used;
    for (auto [s, d] : *flows) {
      if (s == d) throw std::invalid_argument("app.flows: source equals destination (" + std::to_string(s) + ")");
      if (!used.insert(s).second || !used.insert(d).second) {
        throw std::invalid_argument("app.flows: endpoints must be distinct across flows");
      }
    }
  }
}

double cbr_interval(double rate_bps, std::uint32_t size_bytes) {
  if (!(rate_bps > 0) || size_bytes == 0) throw std::invalid_argument("cbr_interval: rate and size must be positive");
  return 8.0 * size_bytes / rate_bps;
}

std::vector<FlowSpec> select_flows(std::size_t n_vehicles, const AppConfig& cfg, std::mt19937_64& rng) {
  const double interval = cbr_interval(cfg.rate_bps, cfg.packet_size);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  if (cfg.flows) {
    for (auto [s, d] : *cfg.flows) {
      if (s >= n_vehicles || d >= n_vehicles) {
        throw std::invalid_argument("app.flows: endpoint outside 0.." + std::to_string(n_vehicles) + "-1");
      }
    }
    pairs = *cfg.flows;
  } else {
    if (n_vehicles < 4) throw std::invalid_argument("select_flows: need at least 4 vehicles");
    std::vector<NodeId> ids(n_vehicles);
    std::iota(ids.begin(), ids.end(), NodeId{0});
    std::shuffle(ids.begin(), ids.end(), rng);
    const std::size_t k = n_vehicles / 4;
    for (std::size_t i = 0; i < k; ++i) pairs.emplace_back(ids[2 * i], ids[2 * i + 1]);
  }
  std::uniform_real_distribution<double> offset(0.0, interval);
  std::vector<FlowSpec> flows;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    FlowSpec f;
    f.id = static_cast<std::uint32_t>(i);
    f.src = pairs[i].first;
    f.dst = pairs[i].second;
    f.packet_size = cfg.packet_size;
    f.rate_bps = cfg.rate_bps;
    f.start = cfg.start_s + offset(rng);
    f.max_packets = cfg.max_packets;
    flows.push_back(f);
  }
  return flows;
}

std::vector<SimTime> emit_schedule(const FlowSpec& flow, SimTime sim_end) {
  const SimTime step = SimTime::from_seconds(cbr_interval(flow.rate_bps, flow.packet_size));
  const SimTime start = SimTime::from_seconds(flow.start);
  std::vector<SimTime> out;
  if (step.ns() <= 0) throw std::invalid_argument("emit_schedule: interval rounds to zero");
  for (std::uint64_t k = 0; k < flow.max_packets; ++k) {
    const SimTime t = start + step * static_cast<std::int64_t>(k);
    if (t >= sim_end) break;
    out.push_back(t);
  }
  return out;
}

}  // namespace vanet::traffic
