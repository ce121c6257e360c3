#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <utility>
#include <variant>
#include <vector>

#include "vanet/packet.hpp"
#include "vanet/sim_time.hpp"

namespace vanet::aodv {

struct AodvConfig {
  double active_route_timeout = 3.0;  // s
  double node_traversal_time = 0.040; // s
  int net_diameter = 35;
  int rreq_retries = 2;
  int ttl_start = 1;
  int ttl_increment = 2;
  int ttl_threshold = 7;
  int timeout_buffer = 2;
  std::size_t buffer_per_dest = 64;
  double jitter_max = 0.010;          // s, rebroadcast jitter
  double delete_period_factor = 5.0;

  double net_traversal_time() const { return 2.0 * node_traversal_time * net_diameter; }
  double path_discovery_time() const { return 2.0 * net_traversal_time(); }
  double my_route_timeout() const { return 2.0 * active_route_timeout; }
  double delete_period() const { return delete_period_factor * active_route_timeout; }
  double ring_traversal_time(int ttl) const { return 2.0 * node_traversal_time * (ttl + timeout_buffer); }
  void validate() const;
};

enum class RouteState { valid, invalid };

struct RouteEntry {
  NodeId dest = 0;
  NodeId next_hop = 0;
  int hop_count = 0;
  std::uint32_t dest_seq = 0;
  bool valid_seq = false;
  RouteState state = RouteState::invalid;
  SimTime lifetime;
  std::set<NodeId> precursors;
};

/// Circular comparison: is `a` newer than `b`?
inline bool seq_newer(std::uint32_t a, std::uint32_t b) {
  return static_cast<std::int32_t>(a - b) > 0;
}

/// Whether an advertised (seq, hops) beats the stored entry.
bool fresher(std::uint32_t candidate_seq, int candidate_hops, const RouteEntry& entry);

class RoutingTable {
 public:
  RouteEntry* find(NodeId dest);
  const RouteEntry* find(NodeId dest) const;
  /// Valid and unexpired. Expired entries are invalidated on the way.
  RouteEntry* active(NodeId dest, SimTime now, double delete_period);
  RouteEntry& upsert(NodeId dest);
  const std::map<NodeId, RouteEntry>& entries() const { return routes_; }

 private:
  std::map<NodeId, RouteEntry> routes_;
};

struct SendAction {
  Packet packet;
  NodeId next_hop = kBroadcast;
  SimTime delay;
  bool originated = false;  // new routing message rather than a relayed packet
};
struct DeliverAction {
  Packet packet;
};
struct DropAction {
  Packet packet;
  DropReason reason = DropReason::NRTE;
};
struct TimerAction {
  NodeId dest = 0;
  SimTime at;
  std::uint64_t token = 0;
};

using Action = std::variant<SendAction, DeliverAction, DropAction, TimerAction>;

struct AgentStats {
  std::uint64_t rreq_originated = 0;
  std::uint64_t rreq_forwarded = 0;
  std::uint64_t rrep_originated = 0;
  std::uint64_t rrep_forwarded = 0;
  std::uint64_t rerr_sent = 0;
  std::uint64_t discoveries_failed = 0;
};

/// Routing agent of one node. Pure state machine: every entry point returns the
/// actions the host has to carry out (transmit, deliver, drop, arm a timer).
class Agent {
 public:
  using IdSource = std::function<PacketId()>;

  Agent(NodeId self, AodvConfig cfg, IdSource ids, std::mt19937_64* jitter_rng);

  NodeId id() const { return self_; }
  std::uint32_t seq() const { return own_seq_; }

  /// A data packet handed down by the local application.
  std::vector<Action> send_data(Packet p, SimTime now);
  /// A packet received from `prev_hop` through the MAC.
  std::vector<Action> receive(const Packet& p, NodeId prev_hop, SimTime now);

  std::vector<Action> process_rreq(const Packet& p, const RreqMessage& m, NodeId prev_hop, SimTime now);
  std::vector<Action> process_rrep(const Packet& p, const RrepMessage& m, NodeId prev_hop, SimTime now);
  std::vector<Action> process_rerr(const RerrMessage& m, NodeId prev_hop, SimTime now);

  /// MAC gave up on `neighbor`.
  std::vector<Action> handle_link_break(NodeId neighbor, SimTime now);
  std::vector<Action> on_timer(NodeId dest, std::uint64_t token, SimTime now);
  /// Drops everything still buffered with `reason`.
  std::vector<Action> flush(DropReason reason);

  RoutingTable& table() { return table_; }
  const RoutingTable& table() const { return table_; }
  std::size_t buffered(NodeId dest) const;
  bool discovering(NodeId dest) const { return discovery_.contains(dest); }
  const AgentStats& stats() const { return stats_; }

 private:
  struct Discovery {
    int ttl = 1;
    int net_wide_attempts = 0;
    std::uint64_t token = 0;
  };

  void start_discovery(NodeId dest, SimTime now, std::vector<Action>& out);
  void send_rreq(NodeId dest, int ttl, SimTime now, std::vector<Action>& out);
  void arm(NodeId dest, SimTime at, std::vector<Action>& out);
  void forward_data(Packet p, NodeId prev_hop, SimTime now, std::vector<Action>& out);
  void release_buffer(NodeId dest, SimTime now, std::vector<Action>& out);
  void refresh(NodeId dest, SimTime now);
  void update_neighbor(NodeId neighbor, SimTime now);
  void send_rerr(std::vector<std::pair<NodeId, std::uint32_t>> unreachable, SimTime now, std::vector<Action>& out);
  bool seen(NodeId orig, std::uint32_t rreq_id, SimTime now);
  SimTime jitter();
  Packet make_packet(NodeId dst, std::uint8_t ttl, std::uint32_t size, SimTime now, Payload payload);
  SimTime seconds(double s) const { return SimTime::from_seconds(s); }

  NodeId self_;
  AodvConfig cfg_;
  IdSource ids_;
  std::mt19937_64* rng_;
  std::uint32_t own_seq_ = 0;
  std::uint32_t rreq_id_ = 0;
  std::uint64_t next_token_ = 1;
  RoutingTable table_;
  std::map<NodeId, std::deque<Packet>> buffer_;
  std::map<NodeId, Discovery> discovery_;
  std::map<std::pair<NodeId, std::uint32_t>, SimTime> seen_;
  AgentStats stats_;
};

}  // namespace vanet::aodv
