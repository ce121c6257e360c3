#include "vanet/aodv.hpp"

#include <algorithm>
#include <stdexcept>

namespace vanet::aodv {

namespace {

bool should_update(std::uint32_t seq, int hops, const RouteEntry& e) {
  return fresher(seq, hops, e) || (seq == e.dest_seq && e.state == RouteState::invalid);
}

std::uint8_t clamp_ttl(int ttl) {
  return static_cast<std::uint8_t>(std::clamp(ttl, 0, 255));
}

}  // namespace

void AodvConfig::validate() const {
  if (!(active_route_timeout > 0 && node_traversal_time > 0)) throw std::invalid_argument("aodv timeouts must be positive");
  if (net_diameter < 1 || ttl_start < 1 || ttl_increment < 1 || ttl_threshold < ttl_start) {
    throw std::invalid_argument("aodv ttl parameters out of range");
  }
  if (rreq_retries < 0) throw std::invalid_argument("aodv.rreq_retries must be >= 0");
  if (buffer_per_dest < 1) throw std::invalid_argument("aodv.buffer_per_dest must be >= 1");
  if (jitter_max < 0) throw std::invalid_argument("aodv.jitter_s must be >= 0");
}

bool fresher(std::uint32_t candidate_seq, int candidate_hops, const RouteEntry& entry) {
  if (!entry.valid_seq) return true;
  if (seq_newer(candidate_seq, entry.dest_seq)) return true;
  return candidate_seq == entry.dest_seq && candidate_hops < entry.hop_count;
}

RouteEntry* RoutingTable::find(NodeId dest) {
  auto it = routes_.find(dest);
  return it == routes_.end() ? nullptr : &it->second;
}

const RouteEntry* RoutingTable::find(NodeId dest) const {
  auto it = routes_.find(dest);
  return it == routes_.end() ? nullptr : &it->second;
}

RouteEntry* RoutingTable::active(NodeId dest, SimTime now, double delete_period) {
  RouteEntry* e = find(dest);
  if (!e || e->state != RouteState::valid) return nullptr;
  if (e->lifetime <= now) {
    e->state = RouteState::invalid;
    e->lifetime = now + SimTime::from_seconds(delete_period);
    return nullptr;
  }
  return e;
}

RouteEntry& RoutingTable::upsert(NodeId dest) {
  auto [it, inserted] = routes_.try_emplace(dest);
  if (inserted) it->second.dest = dest;
  return it->second;
}

Agent::Agent(NodeId self, AodvConfig cfg, IdSource ids, std::mt19937_64* jitter_rng)
    : self_(self), cfg_(cfg), ids_(std::move(ids)), rng_(jitter_rng) {}

std::size_t Agent::buffered(NodeId dest) const {
  auto it = buffer_.find(dest);
  return it == buffer_.end() ? 0 : it->second.size();
}

Packet Agent::make_packet(NodeId dst, std::uint8_t ttl, std::uint32_t size, SimTime now, Payload payload) {
  Packet p;
  p.id = ids_();
  p.src = self_;
  p.dst = dst;
  p.ttl = ttl;
  p.size_bytes = size;
  p.created = now;
  p.payload = std::move(payload);
  return p;
}

SimTime Agent::jitter() {
  if (!rng_ || cfg_.jitter_max <= 0) return {};
  return seconds(std::uniform_real_distribution<double>(0.0, cfg_.jitter_max)(*rng_));
}

void Agent::refresh(NodeId dest, SimTime now) {
  RouteEntry* e = table_.find(dest);
  if (e && e->state == RouteState::valid) {
    e->lifetime = std::max(e->lifetime, now + seconds(cfg_.active_route_timeout));
  }
}

void Agent::update_neighbor(NodeId neighbor, SimTime now) {
  RouteEntry& e = table_.upsert(neighbor);
  e.next_hop = neighbor;
  e.hop_count = 1;
  if (e.state != RouteState::valid) e.lifetime = SimTime{};
  e.state = RouteState::valid;
  e.lifetime = std::max(e.lifetime, now + seconds(cfg_.active_route_timeout));
}

bool Agent::seen(NodeId orig, std::uint32_t rreq_id, SimTime now) {
  if (seen_.size() > 512) std::erase_if(seen_, [&](const auto& kv) { return kv.second <= now; });
  auto key = std::make_pair(orig, rreq_id);
  auto it = seen_.find(key);
  if (it != seen_.end() && it->second > now) return true;
  seen_[key] = now + seconds(cfg_.path_discovery_time());
  return false;
}

std::vector<Action> Agent::send_data(Packet p, SimTime now) {
  std::vector<Action> out;
  if (RouteEntry* r = table_.active(p.dst, now, cfg_.delete_period())) {
    refresh(p.dst, now);
    refresh(r->next_hop, now);
    const NodeId nh = r->next_hop;
    out.push_back(SendAction{std::move(p), nh, {}, true});
    return out;
  }
  const NodeId dest = p.dst;
  auto& q = buffer_[dest];
  if (q.size() >= cfg_.buffer_per_dest) {
    out.push_back(DropAction{std::move(q.front()), DropReason::NRTE});
    q.pop_front();
  }
  q.push_back(std::move(p));
  if (!discovering(dest)) start_discovery(dest, now, out);
  return out;
}

void Agent::arm(NodeId dest, SimTime at, std::vector<Action>& out) {
  auto& d = discovery_[dest];
  d.token = next_token_++;
  out.push_back(TimerAction{dest, at, d.token});
}

void Agent::send_rreq(NodeId dest, int ttl, SimTime now, std::vector<Action>& out) {
  ++own_seq_;
  ++rreq_id_;
  seen(self_, rreq_id_, now);
  RreqMessage m;
  m.orig = self_;
  m.orig_seq = own_seq_;
  m.dest = dest;
  if (const RouteEntry* e = table_.find(dest); e && e->valid_seq) {
    m.dest_seq = e->dest_seq;
    m.dest_seq_known = true;
  }
  m.rreq_id = rreq_id_;
  m.hop_count = 0;
  m.ttl = clamp_ttl(ttl);
  ++stats_.rreq_originated;
  out.push_back(SendAction{make_packet(kBroadcast, m.ttl, kRreqBytes, now, m), kBroadcast, {}, true});
}

void Agent::start_discovery(NodeId dest, SimTime now, std::vector<Action>& out) {
  int ttl = cfg_.ttl_start;
  if (const RouteEntry* e = table_.find(dest); e && e->hop_count > 0) {
    ttl = std::max(ttl, e->hop_count + cfg_.ttl_increment);
  }
  if (ttl > cfg_.ttl_threshold) ttl = cfg_.net_diameter;
  discovery_[dest] = Discovery{ttl, 0, 0};
  send_rreq(dest, ttl, now, out);
  const double wait = ttl >= cfg_.net_diameter ? cfg_.net_traversal_time() : cfg_.ring_traversal_time(ttl);
  arm(dest, now + seconds(wait), out);
}

std::vector<Action> Agent::on_timer(NodeId dest, std::uint64_t token, SimTime now) {
  std::vector<Action> out;
  auto it = discovery_.find(dest);
  if (it == discovery_.end() || it->second.token != token) return out;
  if (table_.active(dest, now, cfg_.delete_period())) {
    release_buffer(dest, now, out);
    return out;
  }
  Discovery& d = it->second;
  if (d.ttl < cfg_.net_diameter) {
    d.ttl += cfg_.ttl_increment;
    if (d.ttl > cfg_.ttl_threshold) d.ttl = cfg_.net_diameter;
  } else {
    ++d.net_wide_attempts;
    if (d.net_wide_attempts > cfg_.rreq_retries) {
      ++stats_.discoveries_failed;
      discovery_.erase(it);
      if (auto b = buffer_.find(dest); b != buffer_.end()) {
        for (auto& p : b->second) out.push_back(DropAction{std::move(p), DropReason::NRTE});
        buffer_.erase(b);
      }
      return out;
    }
  }
  const int ttl = d.ttl;
  const int attempts = d.net_wide_attempts;
  send_rreq(dest, ttl, now, out);
  const double wait = ttl >= cfg_.net_diameter ? cfg_.net_traversal_time() * static_cast<double>(1 << attempts)
                                               : cfg_.ring_traversal_time(ttl);
  arm(dest, now + seconds(wait), out);
  return out;
}

void Agent::release_buffer(NodeId dest, SimTime now, std::vector<Action>& out) {
  discovery_.erase(dest);
  auto b = buffer_.find(dest);
  if (b == buffer_.end()) return;
  RouteEntry* r = table_.active(dest, now, cfg_.delete_period());
  if (!r) return;
  refresh(dest, now);
  for (auto& p : b->second) out.push_back(SendAction{std::move(p), r->next_hop, {}, true});
  buffer_.erase(b);
}

std::vector<Action> Agent::receive(const Packet& p, NodeId prev_hop, SimTime now) {
  if (const auto* m = std::get_if<RreqMessage>(&p.payload)) return process_rreq(p, *m, prev_hop, now);
  if (const auto* m = std::get_if<RrepMessage>(&p.payload)) return process_rrep(p, *m, prev_hop, now);
  if (const auto* m = std::get_if<RerrMessage>(&p.payload)) return process_rerr(*m, prev_hop, now);
  std::vector<Action> out;
  if (p.dst == self_) {
    refresh(p.src, now);
    refresh(prev_hop, now);
    out.push_back(DeliverAction{p});
    return out;
  }
  forward_data(p, prev_hop, now, out);
  return out;
}

void Agent::forward_data(Packet p, NodeId prev_hop, SimTime now, std::vector<Action>& out) {
  if (p.ttl <= 1) {
    out.push_back(DropAction{std::move(p), DropReason::TTL});
    return;
  }
  --p.ttl;
  RouteEntry* r = table_.active(p.dst, now, cfg_.delete_period());
  if (!r) {
    const RouteEntry* e = table_.find(p.dst);
    const std::uint32_t seq = e ? e->dest_seq : 0;
    const NodeId dst = p.dst;
    out.push_back(DropAction{std::move(p), DropReason::NRTE});
    send_rerr({{dst, seq}}, now, out);
    return;
  }
  const NodeId nh = r->next_hop;
  refresh(p.dst, now);
  refresh(p.src, now);
  refresh(prev_hop, now);
  refresh(nh, now);
  out.push_back(SendAction{std::move(p), nh, {}, false});
}

std::vector<Action> Agent::process_rreq(const Packet& p, const RreqMessage& m, NodeId prev_hop, SimTime now) {
  std::vector<Action> out;
  if (m.orig == self_) return out;
  update_neighbor(prev_hop, now);
  if (seen(m.orig, m.rreq_id, now)) return out;

  const int hops = m.hop_count + 1;
  RouteEntry& rev = table_.upsert(m.orig);
  if (rev.state != RouteState::valid || should_update(m.orig_seq, hops, rev)) {
    rev.next_hop = prev_hop;
    rev.hop_count = hops;
    rev.dest_seq = m.orig_seq;
    rev.valid_seq = true;
    if (rev.state != RouteState::valid) rev.lifetime = SimTime{};
    rev.state = RouteState::valid;
  }
  const double minimal = 2.0 * cfg_.net_traversal_time() - 2.0 * hops * cfg_.node_traversal_time;
  rev.lifetime = std::max(rev.lifetime, now + seconds(std::max(minimal, cfg_.active_route_timeout)));
  if (buffer_.contains(m.orig)) release_buffer(m.orig, now, out);

  if (m.dest == self_) {
    if (m.dest_seq_known && seq_newer(m.dest_seq, own_seq_)) own_seq_ = m.dest_seq;
    ++own_seq_;
    RrepMessage r{m.orig, self_, own_seq_, 0, cfg_.my_route_timeout()};
    ++stats_.rrep_originated;
    out.push_back(SendAction{make_packet(m.orig, clamp_ttl(cfg_.net_diameter), kRrepBytes, now, r), rev.next_hop, {}, true});
    return out;
  }

  RouteEntry* fwd = table_.active(m.dest, now, cfg_.delete_period());
  if (fwd && fwd->valid_seq && (!m.dest_seq_known || !seq_newer(m.dest_seq, fwd->dest_seq))) {
    RrepMessage r{m.orig, m.dest, fwd->dest_seq, static_cast<std::uint8_t>(fwd->hop_count),
                  (fwd->lifetime - now).seconds()};
    fwd->precursors.insert(prev_hop);
    rev.precursors.insert(fwd->next_hop);
    ++stats_.rrep_originated;
    out.push_back(SendAction{make_packet(m.orig, clamp_ttl(cfg_.net_diameter), kRrepBytes, now, r), rev.next_hop, {}, true});
    return out;
  }

  if (m.ttl <= 1) return out;
  RreqMessage fw = m;
  fw.hop_count = clamp_ttl(hops);
  fw.ttl = static_cast<std::uint8_t>(m.ttl - 1);
  if (const RouteEntry* e = table_.find(m.dest); e && e->valid_seq) {
    if (!fw.dest_seq_known || seq_newer(e->dest_seq, fw.dest_seq)) {
      fw.dest_seq = e->dest_seq;
      fw.dest_seq_known = true;
    }
  }
  Packet q = p;
  q.ttl = fw.ttl;
  q.payload = fw;
  ++stats_.rreq_forwarded;
  out.push_back(SendAction{std::move(q), kBroadcast, jitter(), false});
  return out;
}

std::vector<Action> Agent::process_rrep(const Packet& p, const RrepMessage& m, NodeId prev_hop, SimTime now) {
  std::vector<Action> out;
  update_neighbor(prev_hop, now);
  const int hops = m.hop_count + 1;
  bool updated = false;
  if (m.dest != self_) {
    RouteEntry& fwd = table_.upsert(m.dest);
    if (fwd.state != RouteState::valid && !fwd.valid_seq) {
      updated = true;
    } else {
      updated = should_update(m.dest_seq, hops, fwd);
    }
    if (updated) {
      fwd.next_hop = prev_hop;
      fwd.hop_count = hops;
      fwd.dest_seq = m.dest_seq;
      fwd.valid_seq = true;
      fwd.state = RouteState::valid;
      fwd.lifetime = now + seconds(m.lifetime);
    }
  }
  if (m.orig == self_) {
    if (buffer_.contains(m.dest) || discovering(m.dest)) release_buffer(m.dest, now, out);
    return out;
  }
  if (!updated) return out;
  RouteEntry* rev = table_.active(m.orig, now, cfg_.delete_period());
  if (!rev) return out;
  RouteEntry* fwd = table_.find(m.dest);
  fwd->precursors.insert(rev->next_hop);
  if (RouteEntry* nb = table_.find(prev_hop)) nb->precursors.insert(rev->next_hop);
  rev->lifetime = std::max(rev->lifetime, now + seconds(cfg_.active_route_timeout));
  rev->precursors.insert(prev_hop);

  RrepMessage fw = m;
  fw.hop_count = clamp_ttl(hops);
  Packet q = p;
  if (q.ttl <= 1) return out;
  --q.ttl;
  q.payload = fw;
  ++stats_.rrep_forwarded;
  out.push_back(SendAction{std::move(q), rev->next_hop, {}, false});
  return out;
}

std::vector<Action> Agent::process_rerr(const RerrMessage& m, NodeId prev_hop, SimTime now) {
  std::vector<Action> out;
  std::vector<std::pair<NodeId, std::uint32_t>> lost;
  for (const auto& [dest, seq] : m.unreachable) {
    RouteEntry* e = table_.find(dest);
    if (!e || e->state != RouteState::valid || e->next_hop != prev_hop) continue;
    e->state = RouteState::invalid;
    e->dest_seq = seq;
    e->lifetime = now + seconds(cfg_.delete_period());
    if (!e->precursors.empty()) lost.emplace_back(dest, seq);
  }
  if (!lost.empty()) send_rerr(std::move(lost), now, out);
  return out;
}

std::vector<Action> Agent::handle_link_break(NodeId neighbor, SimTime now) {
  std::vector<Action> out;
  std::vector<std::pair<NodeId, std::uint32_t>> lost;
  for (const auto& [dest, entry] : table_.entries()) {
    (void)entry;
    RouteEntry* e = table_.find(dest);
    if (e->state != RouteState::valid || e->next_hop != neighbor) continue;
    if (e->valid_seq) ++e->dest_seq;
    e->state = RouteState::invalid;
    e->lifetime = now + seconds(cfg_.delete_period());
    if (!e->precursors.empty()) lost.emplace_back(dest, e->dest_seq);
  }
  if (!lost.empty()) send_rerr(std::move(lost), now, out);
  return out;
}

void Agent::send_rerr(std::vector<std::pair<NodeId, std::uint32_t>> unreachable, SimTime now,
                      std::vector<Action>& out) {
  const auto size = kRerrBaseBytes + kRerrPerDestBytes * static_cast<std::uint32_t>(unreachable.size());
  RerrMessage m{std::move(unreachable)};
  ++stats_.rerr_sent;
  out.push_back(SendAction{make_packet(kBroadcast, 1, size, now, std::move(m)), kBroadcast, jitter(), true});
}

std::vector<Action> Agent::flush(DropReason reason) {
  std::vector<Action> out;
  for (auto& [dest, q] : buffer_) {
    for (auto& p : q) out.push_back(DropAction{std::move(p), reason});
  }
  buffer_.clear();
  discovery_.clear();
  return out;
}

}  // namespace vanet::aodv
