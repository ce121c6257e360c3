#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vanet/geometry.hpp"

namespace vanet::road {

/// Raised for malformed documents and failed validation. The message carries
/// the location (document name plus line, or element index and id).
class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NodeKind { priority, traffic_light };
enum class TurnDirection { left, right, straight };
enum class SignalState { green, yellow, red };

struct Offset {
  double h = 0.0;
  double k = 0.0;
};

struct NodeSpec {
  std::string id;
  Point2D position;
  NodeKind kind = NodeKind::priority;
};

struct EdgeSpec {
  std::string id;
  std::string from;
  std::string to;
  int num_lanes = 1;
  double speed_limit = 13.89;
  double priority = 0.0;  // percent; stored, not used by the dynamics
  double length = 0.0;
};

struct Connection {
  std::string from_edge;
  std::string to_edge;
  TurnDirection direction = TurnDirection::straight;
};

struct SignalPhase {
  double duration = 0.0;
  /// One state per connection through the node, in connection file order.
  std::vector<SignalState> states;
};

struct SignalProgram {
  std::string node;
  std::vector<SignalPhase> phases;
  double cycle_offset = 0.0;

  double cycle_length() const;
  /// State of the node-local connection `slot` at absolute time `t`.
  SignalState state_at(std::size_t slot, double t) const;
  /// Seconds from `t` until `slot` is next red; +inf if it never is.
  double time_until_red(std::size_t slot, double t) const;
};

struct BoundingBox {
  double width = 0.0;
  double height = 0.0;
};

/// Validated, immutable road graph. Edges and nodes keep file order; lookups by
/// id go through ordered maps so every iteration is deterministic.
class RoadNetwork {
 public:
  RoadNetwork() = default;

  const std::vector<NodeSpec>& nodes() const { return nodes_; }
  const std::vector<EdgeSpec>& edges() const { return edges_; }
  const std::vector<Connection>& connections() const { return connections_; }
  const std::map<std::string, SignalProgram>& signals() const { return signals_; }

  bool empty() const { return nodes_.empty(); }

  std::optional<std::size_t> node_index(std::string_view id) const;
  std::optional<std::size_t> edge_index(std::string_view id) const;
  const NodeSpec& node(std::string_view id) const;
  const EdgeSpec& edge(std::string_view id) const;

  /// Index into connections() of the (from_edge, to_edge) pair, if listed.
  std::optional<std::size_t> connection_index(std::string_view from_edge,
                                              std::string_view to_edge) const;
  /// Connections leaving the end of edge `edge_idx`, in file order.
  const std::vector<std::size_t>& outgoing(std::size_t edge_idx) const { return outgoing_[edge_idx]; }
  /// Connections passing through `node` (from_edge ends there), in file order.
  std::vector<std::size_t> connections_at(std::string_view node) const;
  /// Position of connection `conn_idx` within connections_at(its node).
  std::size_t signal_slot(std::size_t conn_idx) const { return slot_[conn_idx]; }
  /// Node a connection passes through.
  const std::string& connection_node(std::size_t conn_idx) const;

  const SignalProgram* signal_for(std::string_view node) const;

  /// Box anchored at the origin that encloses every node (the topology extent).
  BoundingBox bounding_box() const;

  /// Builds and validates a network from already-parsed parts. Traffic-light
  /// nodes without a program receive default_signal_program().
  static RoadNetwork build(std::vector<NodeSpec> nodes, std::vector<EdgeSpec> edges,
                           std::vector<std::pair<std::string, std::string>> connections,
                           std::vector<SignalProgram> programs);

 private:
  void index();

  std::vector<NodeSpec> nodes_;
  std::vector<EdgeSpec> edges_;
  std::vector<Connection> connections_;
  std::map<std::string, SignalProgram> signals_;

  std::map<std::string, std::size_t, std::less<>> node_ids_;
  std::map<std::string, std::size_t, std::less<>> edge_ids_;
  std::vector<std::vector<std::size_t>> outgoing_;
  std::vector<std::size_t> slot_;
};

std::vector<Point2D> translate_origin(std::span<const Point2D> points, Offset offset);

/// Parses the nodes/edges/connections/signals XML documents. `source` names the
/// documents in error messages (e.g. the file prefix).
RoadNetwork parse_network(std::string_view nodes_doc, std::string_view edges_doc,
                          std::string_view connections_doc,
                          std::optional<std::string_view> signals_doc = std::nullopt,
                          std::string_view source = "network");

/// Reads `<prefix>.nod.xml`, `<prefix>.edg.xml`, `<prefix>.con.xml` and, when
/// present, `<prefix>.sig.xml`.
RoadNetwork load_network(const std::string& prefix);

struct NetworkDocuments {
  std::string nodes;
  std::string edges;
  std::string connections;
  std::string signals;
};
NetworkDocuments serialize_network(const RoadNetwork& network);
void save_network(const RoadNetwork& network, const std::string& prefix);

TurnDirection classify_turn(const RoadNetwork& network, std::string_view from_edge,
                            std::string_view to_edge);
/// Turn class for a signed heading change in degrees (counterclockwise positive).
TurnDirection classify_heading_change(double degrees);

double bounding_area(const RoadNetwork& network);

/// Fixed-time program: connections grouped by approach axis, each group gets
/// green then yellow while the others are red.
SignalProgram default_signal_program(const RoadNetwork& network, std::string_view node,
                                     double green_s = 30.0, double yellow_s = 3.0);

const char* to_string(TurnDirection d);

}  // namespace vanet::road
