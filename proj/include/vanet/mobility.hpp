#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "vanet/geometry.hpp"
#include "vanet/road_network.hpp"

namespace vanet::mobility {

struct VehicleType {
  std::string id;
  double accel = 0.0;      // m/s^2
  double decel = 0.0;      // m/s^2
  double length = 0.0;     // m
  double max_speed = 0.0;  // m/s
};

/// Car A-D: the four vehicle classes used by the scenarios (ids CarA..CarD).
const std::vector<VehicleType>& builtin_types();

struct MobilityConfig {
  double timestep = 0.1;
  double tau = 1.0;
  double min_gap = 2.5;
};

struct RouteDef {
  std::string id;
  std::vector<std::string> edges;
};

struct VehicleDef {
  std::string id;
  std::string type;
  double depart = 0.0;
  std::optional<std::string> route;       // explicit-route mode
  std::optional<std::string> start_edge;  // turn-policy mode
  std::optional<int> depart_lane;
};

struct RouteFile {
  std::vector<VehicleType> types;
  std::vector<RouteDef> routes;
  std::vector<VehicleDef> vehicles;
};

/// Per incoming edge, the probability of each outgoing connection. Edges with
/// no entry choose uniformly among their outgoing connections.
struct TurnPolicy {
  std::map<std::string, std::vector<std::pair<std::string, double>>> table;
};

RouteFile parse_routes(std::string_view doc, std::string_view name = "routes");
RouteFile load_routes(const std::string& path);
/// Checks types, route edges and connectivity against the network.
void validate_routes(const RouteFile& routes, const road::RoadNetwork& network);
std::string serialize_routes(const RouteFile& routes);

/// `<turns><turn from=".." to=".." probability=".."/>...</turns>`
TurnPolicy parse_turns(std::string_view doc, const road::RoadNetwork& network,
                       std::string_view name = "turns");

/// Krauss safe speed: -b*tau + sqrt((b*tau)^2 + v_l^2 + 2*b*gap), floored at 0.
double safe_speed(double gap, double leader_speed, double decel, double tau);

enum class NextKind { edge, arrival, dead_end };

struct NextStep {
  NextKind kind = NextKind::arrival;
  std::size_t edge = 0;
};

struct VehicleState {
  std::string id;
  std::size_t type = 0;
  std::size_t edge = 0;
  int lane = 0;
  double pos = 0.0;  // front bumper, meters from edge start
  double speed = 0.0;

  std::optional<std::size_t> route;  // index into RouteFile::routes
  std::size_t cursor = 0;            // index of `edge` within the route
  NextStep next;
};

struct Leader {
  double distance = 0.0;  // follower front to leader back
  double speed = 0.0;
  double decel = 0.0;
};

struct StepContext {
  std::optional<Leader> leader;
  /// Distance from the front bumper to a stop line that must be respected.
  std::optional<double> stop_line;
  double lane_speed_limit = 1e9;
  /// Additional upper bound, e.g. to meet a slower limit on the next edge.
  double speed_cap = 1e9;
};

/// One explicit-Euler kinematic update with bounded acceleration/deceleration.
VehicleState step_vehicle(const VehicleState& state, const VehicleType& type,
                          const StepContext& context, const MobilityConfig& config, double dt);

/// Picks the edge after `state.edge`: the next route edge in explicit mode, a
/// policy-weighted connection otherwise.
NextStep choose_next_edge(const VehicleState& state, const road::RoadNetwork& network,
                          const RouteFile& routes, const TurnPolicy& policy, std::mt19937_64& rng);

struct SafetyAudit {
  std::uint64_t vehicle_steps = 0;
  std::uint64_t gap_violations = 0;
  std::uint64_t red_crossings = 0;
  std::uint64_t accel_violations = 0;
  std::uint64_t decel_violations = 0;
  std::uint64_t speed_limit_violations = 0;
  std::uint64_t dead_end_despawns = 0;
  std::uint64_t arrivals = 0;
};

/// Microscopic world: lanes, leaders, junction passes, departures. One call to
/// step() produces the state at the next timestep boundary.
class MobilityWorld {
 public:
  enum class Status { pending, active, done };

  struct Vehicle {
    VehicleState state;
    Status status = Status::pending;
    double depart = 0.0;
    std::optional<int> depart_lane;
    std::size_t start_edge = 0;
    bool has_pass = false;
    int target_lane = 0;
    // Set while the body still overhangs the previous edge.
    std::optional<std::size_t> prev_edge;
    int prev_lane = 0;
  };

  MobilityWorld(const road::RoadNetwork& network, RouteFile routes, TurnPolicy policy,
                MobilityConfig config, bool signals_enabled, std::mt19937_64& turn_rng);

  /// First call handles departures at t = 0; later calls advance by one timestep.
  void step();

  double time() const { return static_cast<double>(step_index_) * config_.timestep; }
  std::int64_t step_index() const { return step_index_; }
  const std::vector<Vehicle>& vehicles() const { return vehicles_; }
  const VehicleType& type_of(std::size_t v) const { return routes_.types[vehicles_[v].state.type]; }
  Point2D position(std::size_t v) const;
  bool active(std::size_t v) const { return vehicles_[v].status == Status::active; }
  std::size_t active_count() const;
  const SafetyAudit& audit() const { return audit_; }
  const road::RoadNetwork& network() const { return network_; }
  const MobilityConfig& config() const { return config_; }

  /// Number of active vehicles within `radius` of any signalized node.
  std::size_t count_near_signals(double radius) const;

  /// Appends `time,vehicle,edge,lane,pos,speed,x,y` rows for active vehicles.
  void append_trace(std::string& out) const;

  /// Signal state for a connection at time t, honoring signals_enabled.
  road::SignalState signal_state(std::size_t conn_idx, double t) const;

 private:
  struct LaneEntry {
    std::size_t vehicle;
    double pos;  // front position in the lane's coordinates
    bool overhang;
  };

  void rebuild_lanes();
  std::vector<LaneEntry>& lane(std::size_t edge, int lane_idx);
  void grant_passes();
  bool try_insert(std::size_t v);
  void enter_edge(std::size_t v, std::size_t edge, int lane_idx, double pos);
  void audit_gaps();

  const road::RoadNetwork& network_;
  RouteFile routes_;
  TurnPolicy policy_;
  MobilityConfig config_;
  bool signals_enabled_;
  std::mt19937_64& rng_;

  std::vector<Vehicle> vehicles_;
  std::vector<std::size_t> depart_order_;
  std::size_t next_depart_ = 0;
  std::vector<std::size_t> pending_;  // departures that were blocked
  std::int64_t step_index_ = -1;

  std::vector<std::size_t> lane_base_;  // edge -> offset into lanes_
  std::vector<std::vector<LaneEntry>> lanes_;
  // (edge, lane) -> vehicle currently holding a pass into it from elsewhere
  std::map<std::pair<std::size_t, int>, std::size_t> locks_;
  std::vector<std::size_t> signal_nodes_;
  SafetyAudit audit_;
};

}  // namespace vanet::mobility
