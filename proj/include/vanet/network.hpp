#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "vanet/aodv.hpp"
#include "vanet/event_queue.hpp"
#include "vanet/geometry.hpp"
#include "vanet/mac.hpp"
#include "vanet/packet.hpp"
#include "vanet/phy.hpp"
#include "vanet/rng.hpp"
#include "vanet/trace.hpp"

namespace vanet::net {

struct NetConfig {
  phy::PhyConfig phy;
  mac::MacConfig mac;
  aodv::AodvConfig aodv;
  /// Propagation plus sensing latency, identical for every link.
  SimTime sense_delay = SimTime::from_us(1);
};

struct NetStats {
  std::uint64_t transmissions = 0;
  std::uint64_t acks = 0;
  std::uint64_t frames_delivered = 0;
  std::uint64_t frames_collided = 0;
  std::uint64_t retries = 0;
  std::uint64_t link_breaks = 0;
  std::uint64_t cs_violations = 0;  // transmissions started while sensing busy
  std::size_t max_queue = 0;
};

/// Wireless stack for a set of nodes: shared channel, per-node DCF MAC with
/// interface queue, and an AODV agent. Positions come from `position` and are
/// read when a frame starts.
class Network {
 public:
  using PositionFn = std::function<Point2D(NodeId)>;
  using ReceiveHook = std::function<void(NodeId, const Packet&)>;

  Network(engine::EventQueue& events, std::size_t n_nodes, NetConfig cfg, PositionFn position,
          const RngStreams& rng, std::string* trace);
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  /// Brings a node up with fresh state, or takes it down dropping what it holds
  /// with reason END.
  void set_alive(NodeId n, bool alive);
  bool alive(NodeId n) const { return nodes_.at(n).alive; }
  std::size_t size() const { return nodes_.size(); }

  /// Application send from `src`; logs the AGT send and hands the packet to routing.
  PacketId app_send(NodeId src, NodeId dst, std::uint32_t flow, std::uint32_t seq, std::uint32_t wire_bytes);
  /// Run end: every packet still held anywhere is dropped with reason END.
  void finish();

  void on_app_receive(ReceiveHook hook) { receive_hook_ = std::move(hook); }

  aodv::Agent& agent(NodeId n) { return nodes_.at(n).agent; }
  std::size_t queue_size(NodeId n) const { return nodes_.at(n).ifq.size(); }
  const NetStats& stats() const { return stats_; }
  const NetConfig& config() const { return cfg_; }

 private:
  enum class Phase { idle, transmitting, awaiting_ack };

  struct Signal {
    std::uint64_t tx = 0;
    double power = 0.0;
    double interference = 0.0;
    bool corrupted = false;
  };

  struct Node {
    explicit Node(aodv::Agent a) : agent(std::move(a)) {}
    bool alive = false;
    std::uint32_t epoch = 0;
    aodv::Agent agent;
    mac::IfQueue ifq;
    std::optional<mac::Frame> current;
    bool owned = false;  // false once the current frame reached its next hop
    Phase phase = Phase::idle;
    int cw = 31;
    int attempts = 0;
    int backoff = -1;  // pending slots; -1 when no countdown is pending
    bool armed = false;
    std::uint64_t token = 0;
    SimTime countdown_start;
    SimTime idle_since;
    int sensed = 0;
    bool tx_busy = false;
    bool ack_ok = false;
    std::uint64_t current_tx = 0;
    std::vector<Signal> signals;
  };

  struct Exposure {
    NodeId node;
    std::uint32_t epoch;
    double power;
  };

  struct Tx {
    NodeId sender = 0;
    std::uint32_t epoch = 0;
    bool ack = false;
    bool cancelled = false;
    std::optional<mac::Frame> frame;
    std::vector<Exposure> exposed;
  };

  aodv::Agent make_agent(NodeId n);
  bool busy(const Node& node) const { return node.sensed > 0 || node.tx_busy; }
  SimTime now() const { return events_.now(); }
  void log(NodeId n, trace::Event ev, trace::Layer layer, const Packet& p,
           std::optional<DropReason> r = std::nullopt);

  void exec(NodeId n, std::vector<aodv::Action> actions);
  void route_send(NodeId n, aodv::SendAction s);
  void enqueue(NodeId n, mac::Frame f);
  void kick(NodeId n);
  void arm(NodeId n);
  void on_busy(NodeId n);
  void on_idle(NodeId n);
  void on_timer(NodeId n, std::uint32_t epoch, std::uint64_t token);
  void transmit(NodeId n);
  void send_ack(NodeId n);
  std::uint64_t start_tx(NodeId n, std::optional<mac::Frame> frame, SimTime duration, bool ack);
  void frame_start(std::uint64_t id);
  void frame_end(std::uint64_t id);
  void tx_done(NodeId n, std::uint32_t epoch, bool ack);
  void resolve_unicast(NodeId n, std::uint32_t epoch);
  void link_break(NodeId n, NodeId neighbor);
  void drop_all(NodeId n);

  engine::EventQueue& events_;
  NetConfig cfg_;
  PositionFn position_;
  std::string* trace_;
  std::mt19937_64 mac_rng_;
  std::mt19937_64 routing_rng_;
  std::vector<Node> nodes_;
  std::unordered_map<std::uint64_t, Tx> txs_;
  std::uint64_t next_tx_ = 1;
  PacketId next_packet_ = 1;
  ReceiveHook receive_hook_;
  NetStats stats_;
  SimTime ack_duration_;
  // scratch buffers for the received-power kernel
  std::vector<NodeId> rx_ids_;
  std::vector<Point2D> rx_pos_;
  std::vector<double> rx_pow_;
};

}  // namespace vanet::net
