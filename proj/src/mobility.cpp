#include "vanet/mobility.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "xml_util.hpp"

namespace vanet::mobility {

using road::NetworkError;
using road::RoadNetwork;
using road::SignalState;

namespace {

constexpr double kEps = 1e-9;

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

// Shortest time to cover `d` from speed `v` accelerating at `a` up to `vmax`.
double min_travel_time(double d, double v, double a, double vmax) {
  if (d <= 0) return 0.0;
  if (v >= vmax) return d / vmax;
  const double t_up = (vmax - v) / a;
  const double d_up = v * t_up + 0.5 * a * t_up * t_up;
  if (d <= d_up) return (-v + std::sqrt(v * v + 2.0 * a * d)) / a;
  return t_up + (d - d_up) / vmax;
}

}  // namespace

const std::vector<VehicleType>& builtin_types() {
  static const std::vector<VehicleType> types = {
      {"CarA", 3.0, 6.0, 5.0, 30.0},
      {"CarB", 2.0, 6.0, 7.5, 30.0},
      {"CarC", 1.0, 5.0, 5.0, 20.0},
      {"CarD", 1.0, 5.0, 7.5, 10.0},
  };
  return types;
}

// ---------------------------------------------------------------------------
// Route and turn documents

RouteFile parse_routes(std::string_view doc, std::string_view name) {
  const std::string n(name);
  RouteFile rf;
  rf.types = builtin_types();
  for (const auto& el : xml::elements(doc, "routes", "vType", n)) {
    VehicleType t{el.attr("id"), el.number("accel"), el.number("decel"), el.number("length"),
                  el.number("maxSpeed")};
    if (!(t.accel > 0 && t.decel > 0 && t.length > 0 && t.max_speed > 0)) {
      throw NetworkError(el.where + ": vType parameters must be positive");
    }
    auto it = std::find_if(rf.types.begin(), rf.types.end(), [&](const auto& x) { return x.id == t.id; });
    if (it != rf.types.end()) {
      *it = t;
    } else {
      rf.types.push_back(t);
    }
  }
  for (const auto& el : xml::elements(doc, "routes", "route", n)) {
    rf.routes.push_back({el.attr("id"), split_ws(el.attr("edges"))});
  }
  for (const auto& el : xml::elements(doc, "routes", "vehicle", n)) {
    VehicleDef v;
    v.id = el.attr("id");
    v.type = el.attr("type");
    v.depart = el.number("depart");
    if (el.has("departLane")) v.depart_lane = static_cast<int>(el.number("departLane"));
    const std::string mode = el.attr_or("mode", "route");
    if (mode == "turnpolicy") {
      v.start_edge = el.attr("start");
    } else if (mode == "route") {
      v.route = el.attr("route");
    } else {
      throw NetworkError(el.where + ": unknown mode '" + mode + "'");
    }
    rf.vehicles.push_back(std::move(v));
  }
  return rf;
}

RouteFile load_routes(const std::string& path) { return parse_routes(xml::read_file(path), path); }

void validate_routes(const RouteFile& routes, const RoadNetwork& network) {
  std::set<std::string> route_ids;
  for (const auto& r : routes.routes) {
    const std::string where = "route '" + r.id + "'";
    if (!route_ids.insert(r.id).second) throw NetworkError(where + ": duplicate id");
    if (r.edges.empty()) throw NetworkError(where + ": no edges");
    for (std::size_t i = 0; i < r.edges.size(); ++i) {
      if (!network.edge_index(r.edges[i])) {
        throw NetworkError(where + ": unknown edge '" + r.edges[i] + "'");
      }
      if (i > 0 && !network.connection_index(r.edges[i - 1], r.edges[i])) {
        throw NetworkError(where + ": no connection '" + r.edges[i - 1] + "->" + r.edges[i] + "'");
      }
    }
  }
  std::set<std::string> vehicle_ids;
  for (const auto& v : routes.vehicles) {
    const std::string where = "vehicle '" + v.id + "'";
    if (!vehicle_ids.insert(v.id).second) throw NetworkError(where + ": duplicate id");
    if (std::none_of(routes.types.begin(), routes.types.end(), [&](const auto& t) { return t.id == v.type; })) {
      throw NetworkError(where + ": unknown type '" + v.type + "'");
    }
    if (!std::isfinite(v.depart) || v.depart < 0) throw NetworkError(where + ": invalid depart time");
    if (v.route && !route_ids.contains(*v.route)) {
      throw NetworkError(where + ": unknown route '" + *v.route + "'");
    }
    if (v.start_edge && !network.edge_index(*v.start_edge)) {
      throw NetworkError(where + ": unknown edge '" + *v.start_edge + "'");
    }
  }
}

std::string serialize_routes(const RouteFile& routes) {
  auto num = [](double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  std::ostringstream out;
  out << "<routes>\n";
  for (const auto& t : routes.types) {
    out << "  <vType id=\"" << t.id << "\" accel=\"" << num(t.accel) << "\" decel=\"" << num(t.decel)
        << "\" length=\"" << num(t.length) << "\" maxSpeed=\"" << num(t.max_speed) << "\"/>\n";
  }
  for (const auto& r : routes.routes) {
    out << "  <route id=\"" << r.id << "\" edges=\"";
    for (std::size_t i = 0; i < r.edges.size(); ++i) out << (i ? " " : "") << r.edges[i];
    out << "\"/>\n";
  }
  for (const auto& v : routes.vehicles) {
    out << "  <vehicle id=\"" << v.id << "\" type=\"" << v.type << "\" depart=\"" << num(v.depart) << "\"";
    if (v.route) out << " route=\"" << *v.route << "\"";
    if (v.start_edge) out << " mode=\"turnpolicy\" start=\"" << *v.start_edge << "\"";
    if (v.depart_lane) out << " departLane=\"" << *v.depart_lane << "\"";
    out << "/>\n";
  }
  out << "</routes>\n";
  return out.str();
}

TurnPolicy parse_turns(std::string_view doc, const RoadNetwork& network, std::string_view name) {
  TurnPolicy policy;
  for (const auto& el : xml::elements(doc, "turns", "turn", std::string(name))) {
    const std::string from = el.attr("from");
    const std::string to = el.attr("to");
    const double p = el.number("probability");
    if (!network.connection_index(from, to)) {
      throw NetworkError(el.where + ": no connection '" + from + "->" + to + "'");
    }
    if (p < 0 || p > 1) throw NetworkError(el.where + ": probability outside [0,1]");
    policy.table[from].emplace_back(to, p);
  }
  for (const auto& [from, choices] : policy.table) {
    double sum = 0;
    for (const auto& c : choices) sum += c.second;
    if (std::abs(sum - 1.0) > 1e-6) {
      throw NetworkError(std::string(name) + ": probabilities for edge '" + from + "' sum to " +
                         std::to_string(sum) + ", expected 1");
    }
  }
  return policy;
}

// ---------------------------------------------------------------------------
// Kinematics

double safe_speed(double gap, double leader_speed, double decel, double tau) {
  const double bt = decel * tau;
  const double v = -bt + std::sqrt(bt * bt + leader_speed * leader_speed + 2.0 * decel * gap);
  return std::max(0.0, v);
}

VehicleState step_vehicle(const VehicleState& state, const VehicleType& type,
                          const StepContext& context, const MobilityConfig& config, double dt) {
  const double b = type.decel;
  double v = std::min({state.speed + type.accel * dt, type.max_speed, context.lane_speed_limit,
                       context.speed_cap});
  if (context.leader) {
    const auto& l = *context.leader;
    const double gap = std::max(0.0, l.distance - config.min_gap);
    // A leader that brakes harder than we can is treated as if it were slower.
    const double vl = l.speed * std::sqrt(std::min(1.0, b / l.decel));
    v = std::min(v, safe_speed(gap, vl, b, config.tau));
  }
  if (context.stop_line) {
    const double gap = std::max(0.0, *context.stop_line - config.min_gap);
    v = std::min(v, safe_speed(gap, 0.0, b, config.tau));
  }
  v = std::max(v, std::max(0.0, state.speed - b * dt));

  VehicleState next = state;
  next.speed = v;
  next.pos = state.pos + v * dt;
  return next;
}

NextStep choose_next_edge(const VehicleState& state, const RoadNetwork& network,
                          const RouteFile& routes, const TurnPolicy& policy, std::mt19937_64& rng) {
  if (state.route) {
    const auto& r = routes.routes[*state.route];
    if (state.cursor + 1 >= r.edges.size()) return {NextKind::arrival, 0};
    return {NextKind::edge, *network.edge_index(r.edges[state.cursor + 1])};
  }
  const auto& out = network.outgoing(state.edge);
  if (out.empty()) return {NextKind::dead_end, 0};
  const auto& from_id = network.edges()[state.edge].id;
  auto it = policy.table.find(from_id);
  if (it == policy.table.end()) {
    std::uniform_int_distribution<std::size_t> pick(0, out.size() - 1);
    const auto& c = network.connections()[out[pick(rng)]];
    return {NextKind::edge, *network.edge_index(c.to_edge)};
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng);
  double acc = 0.0;
  for (const auto& [to, p] : it->second) {
    acc += p;
    if (x < acc) return {NextKind::edge, *network.edge_index(to)};
  }
  // Rounding left x above the cumulative sum; take the last positive choice.
  for (auto rit = it->second.rbegin(); rit != it->second.rend(); ++rit) {
    if (rit->second > 0) return {NextKind::edge, *network.edge_index(rit->first)};
  }
  return {NextKind::dead_end, 0};
}

// ---------------------------------------------------------------------------
// MobilityWorld

MobilityWorld::MobilityWorld(const RoadNetwork& network, RouteFile routes, TurnPolicy policy,
                             MobilityConfig config, bool signals_enabled, std::mt19937_64& turn_rng)
    : network_(network),
      routes_(std::move(routes)),
      policy_(std::move(policy)),
      config_(config),
      signals_enabled_(signals_enabled),
      rng_(turn_rng) {
  validate_routes(routes_, network_);
  if (!(config_.timestep > 0 && config_.tau > 0 && config_.min_gap > 0)) {
    throw std::invalid_argument("mobility config values must be positive");
  }

  for (const auto& def : routes_.vehicles) {
    Vehicle v;
    v.state.id = def.id;
    v.state.type = static_cast<std::size_t>(
        std::find_if(routes_.types.begin(), routes_.types.end(), [&](const auto& t) { return t.id == def.type; }) -
        routes_.types.begin());
    v.depart = def.depart;
    v.depart_lane = def.depart_lane;
    if (def.route) {
      const auto r = static_cast<std::size_t>(
          std::find_if(routes_.routes.begin(), routes_.routes.end(), [&](const auto& x) { return x.id == *def.route; }) -
          routes_.routes.begin());
      v.state.route = r;
      v.start_edge = *network_.edge_index(routes_.routes[r].edges.front());
    } else {
      v.start_edge = *network_.edge_index(*def.start_edge);
    }
    vehicles_.push_back(std::move(v));
  }
  depart_order_.resize(vehicles_.size());
  for (std::size_t i = 0; i < depart_order_.size(); ++i) depart_order_[i] = i;
  std::stable_sort(depart_order_.begin(), depart_order_.end(),
                   [&](std::size_t a, std::size_t b) { return vehicles_[a].depart < vehicles_[b].depart; });

  lane_base_.resize(network_.edges().size());
  std::size_t total = 0;
  for (std::size_t e = 0; e < network_.edges().size(); ++e) {
    lane_base_[e] = total;
    total += static_cast<std::size_t>(network_.edges()[e].num_lanes);
  }
  lanes_.resize(total);
  for (const auto& [node, prog] : network_.signals()) {
    signal_nodes_.push_back(*network_.node_index(node));
  }
}

std::vector<MobilityWorld::LaneEntry>& MobilityWorld::lane(std::size_t edge, int lane_idx) {
  return lanes_[lane_base_[edge] + static_cast<std::size_t>(lane_idx)];
}

SignalState MobilityWorld::signal_state(std::size_t conn_idx, double t) const {
  if (!signals_enabled_) return SignalState::green;
  const auto* prog = network_.signal_for(network_.connection_node(conn_idx));
  if (!prog) return SignalState::green;
  return prog->state_at(network_.signal_slot(conn_idx), t);
}

void MobilityWorld::rebuild_lanes() {
  for (auto& l : lanes_) l.clear();
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    const auto& v = vehicles_[i];
    if (v.status != Status::active) continue;
    lane(v.state.edge, v.state.lane).push_back({i, v.state.pos, false});
    if (v.prev_edge) {
      const double prev_len = network_.edges()[*v.prev_edge].length;
      lane(*v.prev_edge, v.prev_lane).push_back({i, prev_len + v.state.pos, true});
    }
  }
  for (auto& l : lanes_) {
    std::sort(l.begin(), l.end(), [](const LaneEntry& a, const LaneEntry& b) {
      if (a.pos != b.pos) return a.pos > b.pos;
      return a.vehicle < b.vehicle;
    });
  }
}

void MobilityWorld::grant_passes() {
  const double t = time();
  struct Candidate {
    double dist;
    std::size_t v;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    auto& v = vehicles_[i];
    if (v.status != Status::active || v.has_pass || v.state.next.kind != NextKind::edge) continue;
    const auto& l = lane(v.state.edge, v.state.lane);
    if (l.empty() || l.front().vehicle != i || l.front().overhang) continue;  // not first on lane
    const auto& type = type_of(i);
    const double d = network_.edges()[v.state.edge].length - v.state.pos;
    const double s = v.state.speed;
    const double request = s * s / (2.0 * type.decel) + s * (config_.tau + config_.timestep) +
                           config_.min_gap + 1.0;
    if (d <= request) candidates.push_back({d, i});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.v < b.v;
  });

  for (const auto& c : candidates) {
    auto& v = vehicles_[c.v];
    const auto& type = type_of(c.v);
    const std::size_t next = v.state.next.edge;
    const auto conn = *network_.connection_index(network_.edges()[v.state.edge].id,
                                                 network_.edges()[next].id);
    const double s = v.state.speed;

    if (signals_enabled_) {
      if (const auto* prog = network_.signal_for(network_.connection_node(conn))) {
        const auto slot = network_.signal_slot(conn);
        switch (prog->state_at(slot, t)) {
          case SignalState::red:
            continue;
          case SignalState::yellow:
            // Stop if that is possible with comfortable braking; otherwise go.
            if (c.dist - config_.min_gap >= s * s / (2.0 * type.decel)) continue;
            break;
          case SignalState::green: {
            const double vmax = std::min(type.max_speed, network_.edges()[v.state.edge].speed_limit);
            const double t_cross = min_travel_time(c.dist, s, type.accel, vmax);
            if (prog->time_until_red(slot, t) < t_cross + config_.timestep) continue;
            break;
          }
        }
      }
    }

    const int target = std::min(v.state.lane, network_.edges()[next].num_lanes - 1);
    const auto& dest = lane(next, target);
    if (!dest.empty()) {
      const auto& last = dest.back();
      const double back = last.pos - type_of(last.vehicle).length;
      if (back < type.length + config_.min_gap) continue;
    }
    auto key = std::make_pair(next, target);
    if (auto it = locks_.find(key); it != locks_.end() && it->second != c.v) continue;

    v.has_pass = true;
    v.target_lane = target;
    locks_[key] = c.v;
  }
}

void MobilityWorld::enter_edge(std::size_t vi, std::size_t edge, int lane_idx, double pos) {
  auto& v = vehicles_[vi];
  v.state.edge = edge;
  v.state.lane = lane_idx;
  v.state.pos = pos;
  if (v.state.route) ++v.state.cursor;
  v.state.next = choose_next_edge(v.state, network_, routes_, policy_, rng_);
}

bool MobilityWorld::try_insert(std::size_t vi) {
  auto& v = vehicles_[vi];
  const auto& type = type_of(vi);
  const auto& edge = network_.edges()[v.start_edge];
  int first = 0;
  int last = edge.num_lanes - 1;
  if (v.depart_lane) first = last = std::clamp(*v.depart_lane, 0, edge.num_lanes - 1);
  for (int l = first; l <= last; ++l) {
    if (auto it = locks_.find({v.start_edge, l}); it != locks_.end()) continue;
    auto& entries = lane(v.start_edge, l);
    bool blocked = false;
    for (const auto& e : entries) {
      if (e.pos - type_of(e.vehicle).length < type.length + config_.min_gap) {
        blocked = true;
        break;
      }
    }
    if (blocked) continue;

    v.status = Status::active;
    v.state.edge = v.start_edge;
    v.state.lane = l;
    v.state.pos = 0.0;
    v.state.speed = 0.0;
    v.state.cursor = 0;
    v.state.next = choose_next_edge(v.state, network_, routes_, policy_, rng_);
    entries.push_back({vi, 0.0, false});
    return true;
  }
  return false;
}

void MobilityWorld::step() {
  if (step_index_ >= 0) {
    const double t0 = time();
    const double dt = config_.timestep;
    rebuild_lanes();
    grant_passes();

    std::vector<VehicleState> next(vehicles_.size());
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      const auto& v = vehicles_[i];
      if (v.status != Status::active) continue;
      const auto& type = type_of(i);
      const auto& edge = network_.edges()[v.state.edge];

      StepContext ctx;
      ctx.lane_speed_limit = edge.speed_limit;

      const auto& entries = lane(v.state.edge, v.state.lane);
      auto self = std::find_if(entries.begin(), entries.end(),
                               [&](const LaneEntry& e) { return e.vehicle == i && !e.overhang; });
      if (self != entries.begin()) {
        const auto& ahead = *std::prev(self);
        const auto& lv = vehicles_[ahead.vehicle];
        ctx.leader = Leader{ahead.pos - type_of(ahead.vehicle).length - v.state.pos, lv.state.speed,
                            type_of(ahead.vehicle).decel};
      } else if (v.state.next.kind == NextKind::edge) {
        const double to_end = edge.length - v.state.pos;
        if (v.has_pass) {
          const auto& nedge = network_.edges()[v.state.next.edge];
          const auto& dest = lane(v.state.next.edge, v.target_lane);
          if (!dest.empty()) {
            const auto& last = dest.back();
            ctx.leader = Leader{to_end + last.pos - type_of(last.vehicle).length,
                                vehicles_[last.vehicle].state.speed, type_of(last.vehicle).decel};
          } else {
            ctx.stop_line = to_end + nedge.length;
          }
          if (nedge.speed_limit < edge.speed_limit) {
            const double room = std::max(0.0, to_end - v.state.speed * dt);
            ctx.speed_cap = std::sqrt(nedge.speed_limit * nedge.speed_limit + 2.0 * type.decel * room);
          }
        } else {
          ctx.stop_line = to_end;
        }
      }
      next[i] = step_vehicle(v.state, type, ctx, config_, dt);
    }

    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      auto& v = vehicles_[i];
      if (v.status != Status::active) continue;
      const auto& type = type_of(i);
      const double old_speed = v.state.speed;
      const double new_speed = next[i].speed;
      ++audit_.vehicle_steps;
      if (new_speed - old_speed > type.accel * dt + kEps) ++audit_.accel_violations;
      if (old_speed - new_speed > type.decel * dt + kEps) ++audit_.decel_violations;

      v.state.speed = new_speed;
      v.state.pos = next[i].pos;
      const double len = network_.edges()[v.state.edge].length;
      if (v.prev_edge && v.state.pos >= type.length) v.prev_edge.reset();
      if (v.state.pos <= len) continue;

      if (v.state.next.kind != NextKind::edge) {
        if (v.state.next.kind == NextKind::dead_end) {
          ++audit_.dead_end_despawns;
        } else {
          ++audit_.arrivals;
        }
        v.status = Status::done;
        v.prev_edge.reset();
        continue;
      }
      const auto conn = *network_.connection_index(network_.edges()[v.state.edge].id,
                                                   network_.edges()[v.state.next.edge].id);
      if (signal_state(conn, t0) == SignalState::red) ++audit_.red_crossings;
      if (!v.has_pass) {
        // The stop line should have held this vehicle; count it as a red-line breach.
        ++audit_.red_crossings;
        v.target_lane = std::min(v.state.lane, network_.edges()[v.state.next.edge].num_lanes - 1);
      }
      if (auto it = locks_.find({v.state.next.edge, v.target_lane}); it != locks_.end() && it->second == i) {
        locks_.erase(it);
      }
      v.has_pass = false;
      v.prev_edge = v.state.edge;
      v.prev_lane = v.state.lane;
      enter_edge(i, v.state.next.edge, v.target_lane, v.state.pos - len);
      if (v.state.pos >= type.length) v.prev_edge.reset();
    }
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      const auto& v = vehicles_[i];
      if (v.status != Status::active) continue;
      const double limit = std::min(type_of(i).max_speed, network_.edges()[v.state.edge].speed_limit);
      if (v.state.speed > limit + kEps) ++audit_.speed_limit_violations;
    }
  }
  ++step_index_;

  // Departures at the new time: blocked ones first, then newly due, in order.
  const double t = time();
  rebuild_lanes();
  std::vector<std::size_t> due;
  due.swap(pending_);
  while (next_depart_ < depart_order_.size() &&
         vehicles_[depart_order_[next_depart_]].depart <= t + kEps) {
    due.push_back(depart_order_[next_depart_++]);
  }
  for (std::size_t vi : due) {
    if (!try_insert(vi)) pending_.push_back(vi);
  }
  audit_gaps();
}

void MobilityWorld::audit_gaps() {
  rebuild_lanes();
  // Approaching pass holders are placed on their target lane at negative offsets.
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    const auto& v = vehicles_[i];
    if (v.status != Status::active || !v.has_pass) continue;
    const double to_end = network_.edges()[v.state.edge].length - v.state.pos;
    auto& dest = lane(v.state.next.edge, v.target_lane);
    dest.push_back({i, -to_end, false});
  }
  for (auto& l : lanes_) {
    std::sort(l.begin(), l.end(), [](const LaneEntry& a, const LaneEntry& b) {
      if (a.pos != b.pos) return a.pos > b.pos;
      return a.vehicle < b.vehicle;
    });
    for (std::size_t k = 1; k < l.size(); ++k) {
      if (l[k].vehicle == l[k - 1].vehicle) continue;
      const double leader_back = l[k - 1].pos - type_of(l[k - 1].vehicle).length;
      if (l[k].pos > leader_back + 1e-6) ++audit_.gap_violations;
    }
  }
}

Point2D MobilityWorld::position(std::size_t v) const {
  const auto& s = vehicles_[v].state;
  const auto& e = network_.edges()[s.edge];
  const auto& a = network_.node(e.from).position;
  const auto& b = network_.node(e.to).position;
  return lerp(a, b, std::clamp(s.pos / e.length, 0.0, 1.0));
}

std::size_t MobilityWorld::active_count() const {
  return static_cast<std::size_t>(
      std::count_if(vehicles_.begin(), vehicles_.end(), [](const Vehicle& v) { return v.status == Status::active; }));
}

std::size_t MobilityWorld::count_near_signals(double radius) const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    if (!active(i)) continue;
    const auto p = position(i);
    for (std::size_t n : signal_nodes_) {
      if (distance(p, network_.nodes()[n].position) <= radius) {
        ++count;
        break;
      }
    }
  }
  return count;
}

void MobilityWorld::append_trace(std::string& out) const {
  char buf[256];
  const double t = time();
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    if (!active(i)) continue;
    const auto& s = vehicles_[i].state;
    const auto p = position(i);
    const int n = std::snprintf(buf, sizeof buf, "%.3f,%s,%s,%d,%.3f,%.3f,%.3f,%.3f\n", t, s.id.c_str(),
                                network_.edges()[s.edge].id.c_str(), s.lane, s.pos, s.speed, p.x, p.y);
    out.append(buf, static_cast<std::size_t>(n));
  }
}

}  // namespace vanet::mobility
