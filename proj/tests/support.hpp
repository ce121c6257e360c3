#pragma once

#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "vanet/event_queue.hpp"
#include "vanet/network.hpp"

namespace vanet::test {

inline const std::string kFixtures = VANET_FIXTURES;
inline const std::string kData = VANET_DATA;
inline std::string cross_prefix() { return kFixtures + "/cross/cross"; }

/// Nodes at fixed positions sharing one channel, every node up.
struct StaticNet {
  engine::EventQueue events;
  std::vector<Point2D> pos;
  std::string trace;
  std::unique_ptr<net::Network> net;
  std::vector<std::pair<NodeId, Packet>> delivered;
  PacketId next_seq = 0;

  explicit StaticNet(std::vector<Point2D> positions, std::uint64_t seed = 1, net::NetConfig cfg = {})
      : pos(std::move(positions)) {
    net = std::make_unique<net::Network>(events, pos.size(), cfg, [this](NodeId n) { return pos[n]; },
                                         RngStreams(seed), &trace);
    net->on_app_receive([this](NodeId n, const Packet& p) { delivered.emplace_back(n, p); });
    for (NodeId n = 0; n < pos.size(); ++n) net->set_alive(n, true);
  }
  StaticNet(const StaticNet&) = delete;
  StaticNet& operator=(const StaticNet&) = delete;

  PacketId send(NodeId src, NodeId dst, std::uint32_t flow = 0) {
    return net->app_send(src, dst, flow, static_cast<std::uint32_t>(next_seq++), 1028);
  }
  void run_for(double s) { events.run_until(events.now() + SimTime::from_seconds(s)); }
  std::size_t delivered_to(NodeId n) const {
    std::size_t k = 0;
    for (const auto& [at, p] : delivered) k += at == n;
    return k;
  }
};

/// Hop distances from `src` in the unit-disk graph; -1 when unreachable.
inline std::vector<int> bfs_hops(const std::vector<Point2D>& pos, NodeId src, double radius,
                                 const std::vector<bool>& present = {}) {
  std::vector<int> d(pos.size(), -1);
  auto up = [&](std::size_t i) { return present.empty() || present[i]; };
  std::deque<std::size_t> q{src};
  d[src] = 0;
  while (!q.empty()) {
    const auto u = q.front();
    q.pop_front();
    for (std::size_t v = 0; v < pos.size(); ++v) {
      if (d[v] < 0 && up(v) && distance(pos[u], pos[v]) <= radius) {
        d[v] = d[u] + 1;
        q.push_back(v);
      }
    }
  }
  return d;
}

inline std::vector<Point2D> line_fixture(int n, double spacing) {
  std::vector<Point2D> p;
  for (int i = 0; i < n; ++i) p.push_back({i * spacing, 0.0});
  return p;
}

inline std::vector<Point2D> ring_fixture(int n, double chord) {
  const double r = chord / (2.0 * std::sin(M_PI / n));
  std::vector<Point2D> p;
  for (int i = 0; i < n; ++i) p.push_back({r * std::cos(2 * M_PI * i / n), r * std::sin(2 * M_PI * i / n)});
  return p;
}

inline std::vector<Point2D> grid_fixture(int cols, int rows, double spacing) {
  std::vector<Point2D> p;
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) p.push_back({i * spacing, j * spacing});
  }
  return p;
}

}  // namespace vanet::test
