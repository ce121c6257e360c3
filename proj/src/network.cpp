#include "vanet/network.hpp"

#include <algorithm>

namespace vanet::net {

using trace::Event;
using trace::Layer;

Network::Network(engine::EventQueue& events, std::size_t n_nodes, NetConfig cfg, PositionFn position,
                 const RngStreams& rng, std::string* trace)
    : events_(events),
      cfg_(cfg),
      position_(std::move(position)),
      trace_(trace),
      mac_rng_(rng.stream("mac")),
      routing_rng_(rng.stream("routing")) {
  cfg_.phy.validate();
  cfg_.mac.validate();
  cfg_.aodv.validate();
  nodes_.reserve(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    nodes_.emplace_back(make_agent(static_cast<NodeId>(i)));
    nodes_.back().ifq = mac::IfQueue(cfg_.mac.ifq_len);
  }
  ack_duration_ = mac::airtime(kAckBytes, cfg_.mac.basic_rate);
}

aodv::Agent Network::make_agent(NodeId n) {
  return aodv::Agent(n, cfg_.aodv, [this] { return next_packet_++; }, &routing_rng_);
}

void Network::log(NodeId n, Event ev, Layer layer, const Packet& p, std::optional<DropReason> r) {
  if (trace_) trace::append(*trace_, now(), ev, n, layer, p, r);
}

void Network::set_alive(NodeId n, bool up) {
  Node& node = nodes_.at(n);
  if (node.alive == up) return;
  if (!up) {
    drop_all(n);
    if (node.current_tx) {
      if (auto it = txs_.find(node.current_tx); it != txs_.end()) it->second.cancelled = true;
    }
  }
  const std::uint32_t epoch = node.epoch + 1;
  Node fresh(make_agent(n));
  fresh.ifq = mac::IfQueue(cfg_.mac.ifq_len);
  fresh.cw = cfg_.mac.cw_min;
  fresh.alive = up;
  fresh.epoch = epoch;
  fresh.idle_since = now();
  node = std::move(fresh);
}

void Network::drop_all(NodeId n) {
  Node& node = nodes_[n];
  exec(n, node.agent.flush(DropReason::END));
  for (auto& f : node.ifq.remove_if([](const mac::Frame&) { return true; })) {
    log(n, Event::drop, Layer::IFQ, f.packet, DropReason::END);
  }
  if (node.current && node.owned) log(n, Event::drop, Layer::MAC, node.current->packet, DropReason::END);
  node.current.reset();
  node.owned = false;
}

void Network::finish() {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].alive) continue;
    const auto n = static_cast<NodeId>(i);
    drop_all(n);
    if (nodes_[i].current_tx) {
      if (auto it = txs_.find(nodes_[i].current_tx); it != txs_.end()) it->second.cancelled = true;
    }
  }
}

PacketId Network::app_send(NodeId src, NodeId dst, std::uint32_t flow, std::uint32_t seq, std::uint32_t wire_bytes) {
  Packet p;
  p.id = next_packet_++;
  p.src = src;
  p.dst = dst;
  p.size_bytes = wire_bytes;
  p.created = now();
  p.payload = DataPayload{flow, seq};
  log(src, Event::send, Layer::AGT, p);
  const PacketId id = p.id;
  exec(src, nodes_.at(src).agent.send_data(std::move(p), now()));
  return id;
}

void Network::exec(NodeId n, std::vector<aodv::Action> actions) {
  for (auto& a : actions) {
    if (auto* s = std::get_if<aodv::SendAction>(&a)) {
      if (s->delay.ns() > 0) {
        const std::uint32_t epoch = nodes_[n].epoch;
        events_.schedule(now() + s->delay, engine::EventKind::routing_send,
                         [this, n, epoch, send = std::move(*s)]() mutable {
                           if (nodes_[n].alive && nodes_[n].epoch == epoch) route_send(n, std::move(send));
                         });
      } else {
        route_send(n, std::move(*s));
      }
    } else if (auto* d = std::get_if<aodv::DeliverAction>(&a)) {
      log(n, Event::recv, Layer::AGT, d->packet);
      if (receive_hook_) receive_hook_(n, d->packet);
    } else if (auto* x = std::get_if<aodv::DropAction>(&a)) {
      log(n, Event::drop, Layer::RTR, x->packet, x->reason);
    } else if (auto* t = std::get_if<aodv::TimerAction>(&a)) {
      const std::uint32_t epoch = nodes_[n].epoch;
      const NodeId dest = t->dest;
      const std::uint64_t token = t->token;
      events_.schedule(std::max(t->at, now()), engine::EventKind::aodv_timer, [this, n, epoch, dest, token] {
        Node& node = nodes_[n];
        if (node.alive && node.epoch == epoch) exec(n, node.agent.on_timer(dest, token, now()));
      });
    }
  }
}

void Network::route_send(NodeId n, aodv::SendAction s) {
  const bool data = s.packet.is_data();
  if (!s.originated) {
    log(n, Event::forward, Layer::RTR, s.packet);
  } else if (!data) {
    log(n, Event::send, Layer::RTR, s.packet);
  }
  const mac::Band band = data ? mac::Band::data : mac::Band::control;
  enqueue(n, mac::Frame{std::move(s.packet), s.next_hop, band});
}

void Network::enqueue(NodeId n, mac::Frame f) {
  Node& node = nodes_[n];
  if (node.ifq.size() >= node.ifq.capacity()) {
    log(n, Event::drop, Layer::IFQ, f.packet, DropReason::IFQ);
    return;
  }
  node.ifq.enqueue(std::move(f));
  stats_.max_queue = std::max(stats_.max_queue, node.ifq.size());
  kick(n);
}

void Network::kick(NodeId n) {
  Node& node = nodes_[n];
  if (!node.alive || node.current || node.phase != Phase::idle) return;
  auto f = node.ifq.dequeue();
  if (!f) return;
  node.current = std::move(*f);
  node.owned = true;
  node.attempts = 0;
  if (node.backoff >= 0) return;  // post-transmission countdown still running
  // Even on an idle medium a fresh frame waits DIFS plus a random backoff, so
  // nodes that queue at the same instant do not fall into lock-step.
  node.backoff = mac::backoff_draw(node.cw, mac_rng_);
  arm(n);
}

void Network::arm(NodeId n) {
  Node& node = nodes_[n];
  if (busy(node) || node.backoff < 0 || node.phase != Phase::idle) return;
  const SimTime start = std::max(now(), node.idle_since + cfg_.mac.difs);
  const SimTime fire = start + cfg_.mac.slot * node.backoff;
  node.armed = true;
  node.countdown_start = start;
  const std::uint64_t token = ++node.token;
  const std::uint32_t epoch = node.epoch;
  events_.schedule(fire, engine::EventKind::mac_timer, [this, n, epoch, token] { on_timer(n, epoch, token); });
}

void Network::on_busy(NodeId n) {
  Node& node = nodes_[n];
  if (!node.armed) return;
  if (now() > node.countdown_start) {
    const auto elapsed = static_cast<int>((now() - node.countdown_start).ns() / cfg_.mac.slot.ns());
    node.backoff = std::max(0, node.backoff - elapsed);
  }
  node.armed = false;
  ++node.token;
}

void Network::on_idle(NodeId n) {
  Node& node = nodes_[n];
  node.idle_since = now();
  arm(n);
}

void Network::on_timer(NodeId n, std::uint32_t epoch, std::uint64_t token) {
  Node& node = nodes_[n];
  if (!node.alive || node.epoch != epoch || !node.armed || node.token != token) return;
  node.armed = false;
  node.backoff = -1;
  if (node.current && node.phase == Phase::idle) {
    transmit(n);
  } else {
    kick(n);
  }
}

std::uint64_t Network::start_tx(NodeId n, std::optional<mac::Frame> frame, SimTime duration, bool ack) {
  Node& node = nodes_[n];
  if (node.sensed > 0) ++stats_.cs_violations;
  const bool was_busy = busy(node);
  node.tx_busy = true;
  for (auto& s : node.signals) s.corrupted = true;
  if (!was_busy) on_busy(n);

  const std::uint64_t id = next_tx_++;
  Tx tx;
  tx.sender = n;
  tx.epoch = node.epoch;
  tx.ack = ack;
  tx.frame = std::move(frame);
  txs_.emplace(id, std::move(tx));
  const std::uint32_t epoch = node.epoch;
  events_.schedule(now() + cfg_.sense_delay, engine::EventKind::frame_start, [this, id] { frame_start(id); });
  events_.schedule(now() + duration, engine::EventKind::mac_timer, [this, n, epoch, ack] { tx_done(n, epoch, ack); });
  events_.schedule(now() + duration + cfg_.sense_delay, engine::EventKind::frame_end, [this, id] { frame_end(id); });
  return id;
}

void Network::transmit(NodeId n) {
  Node& node = nodes_[n];
  node.phase = Phase::transmitting;
  ++node.attempts;
  ++stats_.transmissions;
  if (node.attempts > 1) ++stats_.retries;
  log(n, Event::send, Layer::MAC, node.current->packet);
  const SimTime duration = mac::airtime(node.current->packet.size_bytes, cfg_.mac.data_rate);
  node.current_tx = start_tx(n, node.current, duration, false);
}

void Network::send_ack(NodeId n) {
  Node& node = nodes_[n];
  if (!node.alive || node.tx_busy) return;
  ++stats_.acks;
  start_tx(n, std::nullopt, ack_duration_, true);
}

void Network::frame_start(std::uint64_t id) {
  auto it = txs_.find(id);
  if (it == txs_.end()) return;
  Tx& tx = it->second;
  const Point2D from = position_(tx.sender);
  rx_ids_.clear();
  rx_pos_.clear();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].alive || i == tx.sender) continue;
    rx_ids_.push_back(static_cast<NodeId>(i));
    rx_pos_.push_back(position_(static_cast<NodeId>(i)));
  }
  rx_pow_.resize(rx_ids_.size());
  phy::receive_powers(cfg_.phy, from, rx_pos_, rx_pow_);
  for (std::size_t k = 0; k < rx_ids_.size(); ++k) {
    const double p = rx_pow_[k];
    if (p < cfg_.phy.cs_thresh) continue;
    const NodeId m = rx_ids_[k];
    Node& node = nodes_[m];
    double others = 0.0;
    for (auto& s : node.signals) {
      others += s.power;
      s.interference += p;
    }
    node.signals.push_back(Signal{id, p, others, node.tx_busy});
    tx.exposed.push_back(Exposure{m, node.epoch, p});
    const bool was_busy = busy(node);
    ++node.sensed;
    if (!was_busy) on_busy(m);
  }
}

void Network::frame_end(std::uint64_t id) {
  auto it = txs_.find(id);
  if (it == txs_.end()) return;
  Tx tx = std::move(it->second);
  txs_.erase(it);

  struct Heard {
    NodeId node;
    bool delivered;
  };
  std::vector<Heard> heard;
  std::vector<NodeId> idle;
  for (const auto& e : tx.exposed) {
    Node& node = nodes_[e.node];
    if (!node.alive || node.epoch != e.epoch) continue;
    auto s = std::find_if(node.signals.begin(), node.signals.end(), [&](const Signal& x) { return x.tx == id; });
    if (s == node.signals.end()) continue;
    if (s->power >= cfg_.phy.rx_thresh) {
      const bool ok = !s->corrupted && mac::captures(s->power, s->interference, cfg_.phy);
      heard.push_back(Heard{e.node, ok});
    }
    node.signals.erase(s);
    --node.sensed;
    if (!busy(node)) idle.push_back(e.node);
  }
  for (NodeId m : idle) on_idle(m);
  if (tx.ack || tx.cancelled || !tx.frame) return;

  const mac::Frame& f = *tx.frame;
  const bool broadcast = f.next_hop == kBroadcast;
  for (const auto& h : heard) {
    if (!broadcast && h.node != f.next_hop) continue;
    if (!h.delivered) {
      ++stats_.frames_collided;
      if (broadcast && !f.packet.is_data()) log(h.node, Event::drop, Layer::MAC, f.packet, DropReason::COL);
      continue;
    }
    ++stats_.frames_delivered;
    if (!broadcast) {
      Node& sender = nodes_[tx.sender];
      if (sender.alive && sender.epoch == tx.epoch && sender.current_tx == id) {
        sender.owned = false;
        sender.ack_ok = true;
      }
      const NodeId m = h.node;
      const std::uint32_t epoch = nodes_[m].epoch;
      events_.schedule(now() + cfg_.mac.sifs, engine::EventKind::mac_timer, [this, m, epoch] {
        if (nodes_[m].alive && nodes_[m].epoch == epoch) send_ack(m);
      });
    }
    log(h.node, Event::recv, Layer::MAC, f.packet);
    exec(h.node, nodes_[h.node].agent.receive(f.packet, tx.sender, now()));
  }
}

void Network::tx_done(NodeId n, std::uint32_t epoch, bool ack) {
  Node& node = nodes_[n];
  if (!node.alive || node.epoch != epoch) return;
  node.tx_busy = false;
  if (ack) {
    if (!busy(node)) on_idle(n);
    return;
  }
  const bool broadcast = node.current && node.current->next_hop == kBroadcast;
  if (broadcast) {
    node.current.reset();
    node.owned = false;
    node.current_tx = 0;
    node.phase = Phase::idle;
    node.cw = cfg_.mac.cw_min;
    node.backoff = mac::backoff_draw(node.cw, mac_rng_);
  } else {
    node.phase = Phase::awaiting_ack;
    const SimTime wait = cfg_.sense_delay + cfg_.mac.sifs + ack_duration_ + cfg_.sense_delay;
    events_.schedule(now() + wait, engine::EventKind::mac_timer, [this, n, epoch] { resolve_unicast(n, epoch); });
  }
  if (!busy(node)) on_idle(n);
  kick(n);
}

void Network::resolve_unicast(NodeId n, std::uint32_t epoch) {
  Node& node = nodes_[n];
  if (!node.alive || node.epoch != epoch || node.phase != Phase::awaiting_ack) return;
  node.phase = Phase::idle;
  node.current_tx = 0;
  std::optional<NodeId> broken;
  if (node.ack_ok) {
    node.ack_ok = false;
    node.current.reset();
    node.owned = false;
    node.cw = cfg_.mac.cw_min;
  } else if (node.attempts >= cfg_.mac.retry_limit) {
    if (node.owned) log(n, Event::drop, Layer::MAC, node.current->packet, DropReason::RET);
    broken = node.current->next_hop;
    node.current.reset();
    node.owned = false;
    node.cw = cfg_.mac.cw_min;
  } else {
    node.cw = mac::next_cw(node.cw, cfg_.mac);
  }
  node.backoff = mac::backoff_draw(node.cw, mac_rng_);
  arm(n);
  if (broken) link_break(n, *broken);
  kick(n);
}

void Network::link_break(NodeId n, NodeId neighbor) {
  ++stats_.link_breaks;
  Node& node = nodes_[n];
  auto actions = node.agent.handle_link_break(neighbor, now());
  for (auto& f : node.ifq.remove_if([&](const mac::Frame& f) { return f.next_hop == neighbor; })) {
    log(n, Event::drop, Layer::IFQ, f.packet, DropReason::LNK);
  }
  exec(n, std::move(actions));
}

}  // namespace vanet::net
