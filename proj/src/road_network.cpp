#include "vanet/road_network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "xml_util.hpp"

namespace vanet::road {

namespace {

double heading_deg(const RoadNetwork& net, const EdgeSpec& e) {
  const auto& a = net.node(e.from).position;
  const auto& b = net.node(e.to).position;
  return std::atan2(b.y - a.y, b.x - a.x) * 180.0 / std::numbers::pi;
}

double normalize_deg(double d) {
  while (d > 180.0) d -= 360.0;
  while (d <= -180.0) d += 360.0;
  return d;
}

NodeKind parse_kind(const std::string& s, const std::string& where) {
  if (s.empty() || s == "priority") return NodeKind::priority;
  if (s == "traffic_light") return NodeKind::traffic_light;
  throw NetworkError(where + ": unknown node type '" + s + "'");
}

SignalState parse_state_char(char c, const std::string& where) {
  switch (c) {
    case 'G':
    case 'g':
      return SignalState::green;
    case 'Y':
    case 'y':
      return SignalState::yellow;
    case 'r':
    case 'R':
      return SignalState::red;
    default:
      throw NetworkError(where + ": invalid signal state character '" + std::string(1, c) + "'");
  }
}

char state_char(SignalState s) {
  switch (s) {
    case SignalState::green:
      return 'G';
    case SignalState::yellow:
      return 'Y';
    case SignalState::red:
      return 'r';
  }
  return 'r';
}

}  // namespace

// ---------------------------------------------------------------------------
// SignalProgram

double SignalProgram::cycle_length() const {
  double total = 0.0;
  for (const auto& p : phases) total += p.duration;
  return total;
}

SignalState SignalProgram::state_at(std::size_t slot, double t) const {
  const double cycle = cycle_length();
  double local = std::fmod(t + cycle_offset, cycle);
  if (local < 0) local += cycle;
  for (const auto& p : phases) {
    if (local < p.duration) return p.states.at(slot);
    local -= p.duration;
  }
  return phases.back().states.at(slot);
}

double SignalProgram::time_until_red(std::size_t slot, double t) const {
  const double cycle = cycle_length();
  double local = std::fmod(t + cycle_offset, cycle);
  if (local < 0) local += cycle;
  // Locate the current phase, then walk forward at most one full cycle.
  std::size_t i = 0;
  double into = local;
  while (i + 1 < phases.size() && into >= phases[i].duration) {
    into -= phases[i].duration;
    ++i;
  }
  if (phases[i].states.at(slot) == SignalState::red) return 0.0;
  double acc = phases[i].duration - into;
  for (std::size_t n = 1; n <= phases.size(); ++n) {
    const auto& p = phases[(i + n) % phases.size()];
    if (p.states.at(slot) == SignalState::red) return acc;
    acc += p.duration;
  }
  return std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// RoadNetwork

std::optional<std::size_t> RoadNetwork::node_index(std::string_view id) const {
  auto it = node_ids_.find(id);
  if (it == node_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> RoadNetwork::edge_index(std::string_view id) const {
  auto it = edge_ids_.find(id);
  if (it == edge_ids_.end()) return std::nullopt;
  return it->second;
}

const NodeSpec& RoadNetwork::node(std::string_view id) const {
  auto idx = node_index(id);
  if (!idx) throw NetworkError("unknown node '" + std::string(id) + "'");
  return nodes_[*idx];
}

const EdgeSpec& RoadNetwork::edge(std::string_view id) const {
  auto idx = edge_index(id);
  if (!idx) throw NetworkError("unknown edge '" + std::string(id) + "'");
  return edges_[*idx];
}

std::optional<std::size_t> RoadNetwork::connection_index(std::string_view from_edge,
                                                         std::string_view to_edge) const {
  auto from = edge_index(from_edge);
  if (!from) return std::nullopt;
  for (std::size_t c : outgoing_[*from]) {
    if (connections_[c].to_edge == to_edge) return c;
  }
  return std::nullopt;
}

std::vector<std::size_t> RoadNetwork::connections_at(std::string_view node) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < connections_.size(); ++i) {
    if (edge(connections_[i].from_edge).to == node) out.push_back(i);
  }
  return out;
}

const std::string& RoadNetwork::connection_node(std::size_t conn_idx) const {
  return edge(connections_.at(conn_idx).from_edge).to;
}

const SignalProgram* RoadNetwork::signal_for(std::string_view node) const {
  auto it = signals_.find(std::string(node));
  return it == signals_.end() ? nullptr : &it->second;
}

BoundingBox RoadNetwork::bounding_box() const {
  double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
  for (const auto& n : nodes_) {
    min_x = std::min(min_x, n.position.x);
    min_y = std::min(min_y, n.position.y);
    max_x = std::max(max_x, n.position.x);
    max_y = std::max(max_y, n.position.y);
  }
  return {max_x - min_x, max_y - min_y};
}

void RoadNetwork::index() {
  node_ids_.clear();
  edge_ids_.clear();
  for (std::size_t i = 0; i < nodes_.size(); ++i) node_ids_.emplace(nodes_[i].id, i);
  for (std::size_t i = 0; i < edges_.size(); ++i) edge_ids_.emplace(edges_[i].id, i);
  outgoing_.assign(edges_.size(), {});
  for (std::size_t i = 0; i < connections_.size(); ++i) {
    outgoing_[*edge_index(connections_[i].from_edge)].push_back(i);
  }
  slot_.assign(connections_.size(), 0);
  std::map<std::string, std::size_t> next_slot;
  for (std::size_t i = 0; i < connections_.size(); ++i) {
    slot_[i] = next_slot[edge(connections_[i].from_edge).to]++;
  }
}

RoadNetwork RoadNetwork::build(std::vector<NodeSpec> nodes, std::vector<EdgeSpec> edges,
                               std::vector<std::pair<std::string, std::string>> connections,
                               std::vector<SignalProgram> programs) {
  RoadNetwork net;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    const std::string where = "node #" + std::to_string(i + 1) + " '" + n.id + "'";
    if (n.id.empty()) throw NetworkError(where + ": empty id");
    if (!std::isfinite(n.position.x) || !std::isfinite(n.position.y))
      throw NetworkError(where + ": non-finite coordinates");
    if (!seen.insert(n.id).second) throw NetworkError(where + ": duplicate node id '" + n.id + "'");
  }
  net.nodes_ = std::move(nodes);
  for (std::size_t i = 0; i < net.nodes_.size(); ++i) net.node_ids_.emplace(net.nodes_[i].id, i);

  seen.clear();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto& e = edges[i];
    const std::string where = "edge #" + std::to_string(i + 1) + " '" + e.id + "'";
    if (e.id.empty()) throw NetworkError(where + ": empty id");
    if (!seen.insert(e.id).second) throw NetworkError(where + ": duplicate edge id '" + e.id + "'");
    if (!net.node_index(e.from)) throw NetworkError(where + ": unknown node '" + e.from + "'");
    if (!net.node_index(e.to)) throw NetworkError(where + ": unknown node '" + e.to + "'");
    if (e.from == e.to) throw NetworkError(where + ": from equals to");
    if (e.num_lanes < 1) throw NetworkError(where + ": numLanes must be >= 1");
    if (!(e.speed_limit > 0)) throw NetworkError(where + ": speed must be > 0");
    if (e.priority < 0 || e.priority > 100) throw NetworkError(where + ": priority outside [0,100]");
    e.length = distance(net.node(e.from).position, net.node(e.to).position);
    if (!(e.length > 0)) throw NetworkError(where + ": zero length");
  }
  net.edges_ = std::move(edges);
  for (std::size_t i = 0; i < net.edges_.size(); ++i) net.edge_ids_.emplace(net.edges_[i].id, i);

  std::set<std::pair<std::string, std::string>> seen_conn;
  for (std::size_t i = 0; i < connections.size(); ++i) {
    const auto& [from, to] = connections[i];
    const std::string where = "connection #" + std::to_string(i + 1) + " '" + from + "->" + to + "'";
    if (!net.edge_index(from)) throw NetworkError(where + ": unknown edge '" + from + "'");
    if (!net.edge_index(to)) throw NetworkError(where + ": unknown edge '" + to + "'");
    if (net.edge(from).to != net.edge(to).from)
      throw NetworkError(where + ": edges do not meet at a common node");
    if (!seen_conn.insert({from, to}).second) throw NetworkError(where + ": duplicate connection");
    Connection c{from, to, TurnDirection::straight};
    c.direction = classify_heading_change(
        normalize_deg(heading_deg(net, net.edge(to)) - heading_deg(net, net.edge(from))));
    net.connections_.push_back(std::move(c));
  }
  net.index();

  for (auto& prog : programs) {
    const std::string where = "signal program for node '" + prog.node + "'";
    auto idx = net.node_index(prog.node);
    if (!idx) throw NetworkError(where + ": unknown node");
    if (net.nodes_[*idx].kind != NodeKind::traffic_light)
      throw NetworkError(where + ": node is not a traffic light");
    if (prog.phases.empty()) throw NetworkError(where + ": no phases");
    const std::size_t slots = net.connections_at(prog.node).size();
    std::vector<bool> ever_green(slots, false);
    for (std::size_t p = 0; p < prog.phases.size(); ++p) {
      const auto& ph = prog.phases[p];
      if (!(ph.duration > 0))
        throw NetworkError(where + ", phase " + std::to_string(p + 1) + ": duration must be > 0");
      if (ph.states.size() != slots)
        throw NetworkError(where + ", phase " + std::to_string(p + 1) + ": state has " +
                           std::to_string(ph.states.size()) + " entries, node has " +
                           std::to_string(slots) + " connections");
      for (std::size_t s = 0; s < slots; ++s) ever_green[s] = ever_green[s] || ph.states[s] == SignalState::green;
    }
    for (std::size_t s = 0; s < slots; ++s) {
      if (!ever_green[s])
        throw NetworkError(where + ": connection slot " + std::to_string(s) + " is never green");
    }
    if (!net.signals_.emplace(prog.node, prog).second)
      throw NetworkError(where + ": duplicate program");
  }
  for (const auto& n : net.nodes_) {
    if (n.kind == NodeKind::traffic_light && !net.signals_.contains(n.id) &&
        !net.connections_at(n.id).empty()) {
      net.signals_.emplace(n.id, default_signal_program(net, n.id));
    }
  }
  return net;
}

// ---------------------------------------------------------------------------
// Free functions

std::vector<Point2D> translate_origin(std::span<const Point2D> points, Offset offset) {
  std::vector<Point2D> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back({p.x + offset.h, p.y + offset.k});
  return out;
}

TurnDirection classify_heading_change(double degrees) {
  const double d = normalize_deg(degrees);
  if (std::abs(d) <= 30.0) return TurnDirection::straight;
  // Beyond +-150 degrees (U-turns) the sign still decides the side.
  return d > 0 ? TurnDirection::left : TurnDirection::right;
}

TurnDirection classify_turn(const RoadNetwork& network, std::string_view from_edge,
                            std::string_view to_edge) {
  auto c = network.connection_index(from_edge, to_edge);
  if (!c) {
    throw NetworkError("no connection '" + std::string(from_edge) + "->" + std::string(to_edge) + "'");
  }
  return network.connections()[*c].direction;
}

double bounding_area(const RoadNetwork& network) {
  if (network.empty()) throw NetworkError("bounding_area of an empty network");
  const auto box = network.bounding_box();
  return box.width * box.height;
}

SignalProgram default_signal_program(const RoadNetwork& network, std::string_view node,
                                     double green_s, double yellow_s) {
  const auto& spec = network.node(node);
  if (spec.kind != NodeKind::traffic_light) {
    throw NetworkError("node '" + std::string(node) + "' is not a traffic light");
  }
  const auto conns = network.connections_at(node);

  // Group connections by the axis (heading modulo 180) of their approach edge.
  std::vector<double> group_axis;
  std::vector<std::size_t> group_of(conns.size());
  for (std::size_t i = 0; i < conns.size(); ++i) {
    double axis = std::fmod(heading_deg(network, network.edge(network.connections()[conns[i]].from_edge)) + 360.0, 180.0);
    std::size_t g = 0;
    for (; g < group_axis.size(); ++g) {
      double diff = std::abs(axis - group_axis[g]);
      diff = std::min(diff, 180.0 - diff);
      if (diff <= 30.0) break;
    }
    if (g == group_axis.size()) group_axis.push_back(axis);
    group_of[i] = g;
  }

  SignalProgram prog;
  prog.node = std::string(node);
  for (std::size_t g = 0; g < group_axis.size(); ++g) {
    SignalPhase green{green_s, {}};
    SignalPhase yellow{yellow_s, {}};
    for (std::size_t i = 0; i < conns.size(); ++i) {
      const bool mine = group_of[i] == g;
      green.states.push_back(mine ? SignalState::green : SignalState::red);
      yellow.states.push_back(mine ? SignalState::yellow : SignalState::red);
    }
    prog.phases.push_back(std::move(green));
    prog.phases.push_back(std::move(yellow));
  }
  return prog;
}

const char* to_string(TurnDirection d) {
  switch (d) {
    case TurnDirection::left:
      return "left";
    case TurnDirection::right:
      return "right";
    case TurnDirection::straight:
      return "straight";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// XML

RoadNetwork parse_network(std::string_view nodes_doc, std::string_view edges_doc,
                          std::string_view connections_doc,
                          std::optional<std::string_view> signals_doc, std::string_view source) {
  using xml::Element;
  const std::string src(source);

  std::vector<NodeSpec> nodes;
  for (const Element& el : xml::elements(nodes_doc, "nodes", "node", src + " nodes")) {
    NodeSpec n;
    n.id = el.attr("id");
    n.position = {el.number("x"), el.number("y")};
    n.kind = parse_kind(el.attr_or("type", ""), el.where);
    nodes.push_back(std::move(n));
  }

  std::vector<EdgeSpec> edges;
  for (const Element& el : xml::elements(edges_doc, "edges", "edge", src + " edges")) {
    EdgeSpec e;
    e.id = el.attr("id");
    e.from = el.attr("from");
    e.to = el.attr("to");
    e.num_lanes = static_cast<int>(el.number_or("numLanes", 1));
    e.speed_limit = el.number_or("speed", 13.89);
    e.priority = el.number_or("priority", 0);
    edges.push_back(std::move(e));
  }

  std::vector<std::pair<std::string, std::string>> conns;
  for (const Element& el :
       xml::elements(connections_doc, "connections", "connection", src + " connections")) {
    conns.emplace_back(el.attr("from"), el.attr("to"));
  }

  std::vector<SignalProgram> programs;
  if (signals_doc) {
    for (const auto& prog_el : xml::elements(*signals_doc, "signals", "program", src + " signals")) {
      SignalProgram prog;
      prog.node = prog_el.attr("node");
      prog.cycle_offset = prog_el.number_or("offset", 0);
      for (const auto& ph_el : prog_el.children("phase")) {
        SignalPhase ph;
        ph.duration = ph_el.number("dur");
        for (char c : ph_el.attr("state")) ph.states.push_back(parse_state_char(c, ph_el.where));
        prog.phases.push_back(std::move(ph));
      }
      programs.push_back(std::move(prog));
    }
  }

  try {
    return RoadNetwork::build(std::move(nodes), std::move(edges), std::move(conns), std::move(programs));
  } catch (const NetworkError& e) {
    throw NetworkError(src + ": " + e.what());
  }
}

RoadNetwork load_network(const std::string& prefix) {
  auto nodes = xml::read_file(prefix + ".nod.xml");
  auto edges = xml::read_file(prefix + ".edg.xml");
  auto conns = xml::read_file(prefix + ".con.xml");
  std::optional<std::string> signals;
  if (std::ifstream probe(prefix + ".sig.xml"); probe) signals = xml::read_file(prefix + ".sig.xml");
  std::optional<std::string_view> sig_view;
  if (signals) sig_view = *signals;
  return parse_network(nodes, edges, conns, sig_view, prefix);
}

NetworkDocuments serialize_network(const RoadNetwork& network) {
  NetworkDocuments docs;
  std::ostringstream n, e, c, s;
  n.precision(17);
  e.precision(17);
  s.precision(17);
  n << "<nodes>\n";
  for (const auto& node : network.nodes()) {
    n << "  <node id=\"" << node.id << "\" x=\"" << node.position.x << "\" y=\"" << node.position.y
      << "\" type=\"" << (node.kind == NodeKind::traffic_light ? "traffic_light" : "priority")
      << "\"/>\n";
  }
  n << "</nodes>\n";
  e << "<edges>\n";
  for (const auto& edge : network.edges()) {
    e << "  <edge id=\"" << edge.id << "\" from=\"" << edge.from << "\" to=\"" << edge.to
      << "\" numLanes=\"" << edge.num_lanes << "\" speed=\"" << edge.speed_limit << "\" priority=\""
      << edge.priority << "\"/>\n";
  }
  e << "</edges>\n";
  c << "<connections>\n";
  for (const auto& conn : network.connections()) {
    c << "  <connection from=\"" << conn.from_edge << "\" to=\"" << conn.to_edge << "\"/>\n";
  }
  c << "</connections>\n";
  s << "<signals>\n";
  for (const auto& [node, prog] : network.signals()) {
    s << "  <program node=\"" << node << "\" offset=\"" << prog.cycle_offset << "\">\n";
    for (const auto& ph : prog.phases) {
      std::string state;
      for (auto st : ph.states) state.push_back(state_char(st));
      s << "    <phase dur=\"" << ph.duration << "\" state=\"" << state << "\"/>\n";
    }
    s << "  </program>\n";
  }
  s << "</signals>\n";
  docs.nodes = n.str();
  docs.edges = e.str();
  docs.connections = c.str();
  docs.signals = s.str();
  return docs;
}

void save_network(const RoadNetwork& network, const std::string& prefix) {
  const auto docs = serialize_network(network);
  xml::write_file(prefix + ".nod.xml", docs.nodes);
  xml::write_file(prefix + ".edg.xml", docs.edges);
  xml::write_file(prefix + ".con.xml", docs.connections);
  xml::write_file(prefix + ".sig.xml", docs.signals);
}

}  // namespace vanet::road
