#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "vanet/packet.hpp"
#include "vanet/sim_time.hpp"

namespace vanet::traffic {

struct AppConfig {
  std::uint32_t packet_size = 1000;  // bytes
  double rate_bps = 64000.0;
  double start_s = 60.0;
  std::uint64_t max_packets = 2280000;
  /// Explicit src:dst pairs; replaces random selection when set.
  std::optional<std::vector<std::pair<NodeId, NodeId>>> flows;

  void validate() const;
};

struct FlowSpec {
  std::uint32_t id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint32_t packet_size = 1000;
  double rate_bps = 64000.0;
  double start = 0.0;  // s
  std::uint64_t max_packets = 2280000;
};

/// 8 * size / rate, in seconds.
double cbr_interval(double rate_bps, std::uint32_t size_bytes);

/// floor(n/4) flows whose 2*floor(n/4) endpoints are all distinct. Flow starts
/// are staggered uniformly within one send interval after cfg.start_s.
std::vector<FlowSpec> select_flows(std::size_t n_vehicles, const AppConfig& cfg, std::mt19937_64& rng);

/// Send instants start, start+D, ... strictly before sim_end, at most max_packets.
std::vector<SimTime> emit_schedule(const FlowSpec& flow, SimTime sim_end);

/// Bytes on the air for one application packet (UDP + IP headers added).
inline std::uint32_t wire_size(std::uint32_t payload) { return payload + kUdpHeaderBytes + kIpHeaderBytes; }

}  // namespace vanet::traffic
