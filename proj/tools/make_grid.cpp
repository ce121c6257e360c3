// Generates the 3x3 signalized grid scenario: network files, one route file per
// vehicle count and a sweep template.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "vanet/mobility.hpp"
#include "vanet/road_network.hpp"

namespace fs = std::filesystem;
using namespace vanet;

namespace {

std::string node_id(int i, int j) { return "n" + std::to_string(i) + std::to_string(j); }

road::RoadNetwork build_grid(double block, int lanes, double speed, double priority) {
  // Intersections laid out around the centre, then shifted so the south-west
  // corner sits at the origin.
  std::vector<Point2D> local;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) local.push_back({(i - 1) * block, (j - 1) * block});
  }
  const auto placed = road::translate_origin(local, {block, block});

  std::vector<road::NodeSpec> nodes;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      const bool corner = (i != 1) && (j != 1);
      nodes.push_back({node_id(i, j), placed[static_cast<std::size_t>(j * 3 + i)],
                       corner ? road::NodeKind::priority : road::NodeKind::traffic_light});
    }
  }
  std::vector<road::EdgeSpec> edges;
  auto link = [&](int i0, int j0, int i1, int j1) {
    for (int dir = 0; dir < 2; ++dir) {
      const auto a = dir ? node_id(i1, j1) : node_id(i0, j0);
      const auto b = dir ? node_id(i0, j0) : node_id(i1, j1);
      road::EdgeSpec e;
      e.id = a + "_" + b;
      e.from = a;
      e.to = b;
      e.num_lanes = lanes;
      e.speed_limit = speed;
      e.priority = priority;
      edges.push_back(e);
    }
  };
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 2; ++i) link(i, j, i + 1, j);
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) link(i, j, i, j + 1);
  }
  std::vector<std::pair<std::string, std::string>> conns;
  for (const auto& in : edges) {
    for (const auto& out : edges) {
      if (out.from == in.to && out.to != in.from) conns.emplace_back(in.id, out.id);
    }
  }
  return road::RoadNetwork::build(std::move(nodes), std::move(edges), std::move(conns), {});
}

std::vector<mobility::RouteDef> random_walks(const road::RoadNetwork& net, int count, int length,
                                             std::mt19937_64& rng, int gateway) {
  std::vector<mobility::RouteDef> routes;
  std::uniform_int_distribution<std::size_t> start(0, net.edges().size() - 1);
  for (int r = 0; r < count; ++r) {
    mobility::RouteDef def;
    def.id = "r" + std::to_string(r);
    std::size_t e = gateway >= 0 ? static_cast<std::size_t>(gateway) : start(rng);
    def.edges.push_back(net.edges()[e].id);
    for (int k = 1; k < length; ++k) {
      const auto& outs = net.outgoing(e);
      std::uniform_int_distribution<std::size_t> pick(0, outs.size() - 1);
      const auto& c = net.connections()[outs[pick(rng)]];
      e = *net.edge_index(c.to_edge);
      def.edges.push_back(c.to_edge);
    }
    routes.push_back(std::move(def));
  }
  return routes;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error(p.string() + ": cannot write");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the 3x3 grid scenario"};
  std::string out_dir = "data/grid3x3";
  std::uint64_t seed = 2024;
  double block = 400.0;
  int n_routes = 36;
  int route_len = 24;
  double depart_max = 50.0;
  int gateway = -1;
  std::vector<std::size_t> counts{10, 20, 30, 40, 50, 60, 70};
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Generator seed");
  app.add_option("--block", block, "Block length in meters");
  app.add_option("--routes", n_routes, "Number of routes");
  app.add_option("--route-length", route_len, "Edges per route");
  app.add_option("--depart-max", depart_max, "Departures are uniform in [0, depart-max] s");
  app.add_option("--gateway", gateway, "Start every route on this edge index (-1: random)");
  app.add_option("--counts", counts, "Vehicle counts")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(out_dir);
    const auto net = build_grid(block, 2, 40.0, 75.0);
    road::save_network(net, (fs::path(out_dir) / "grid").string());

    std::mt19937_64 rng(seed);
    const auto routes = random_walks(net, n_routes, route_len, rng, gateway);
    const auto& types = mobility::builtin_types();
    for (auto n : counts) {
      std::mt19937_64 vrng(seed * 1000 + n);
      std::uniform_int_distribution<std::size_t> pick_route(0, routes.size() - 1);
      std::uniform_int_distribution<std::size_t> pick_type(0, types.size() - 1);
      std::uniform_int_distribution<int> pick_lane(0, 1);
      std::uniform_real_distribution<double> depart(0.0, depart_max);
      mobility::RouteFile file;
      file.types = types;
      file.routes = routes;
      for (std::size_t v = 0; v < n; ++v) {
        mobility::VehicleDef def;
        def.id = "v" + std::to_string(v);
        def.type = types[pick_type(vrng)].id;
        def.depart = std::round(depart(vrng) * 10.0) / 10.0;
        def.route = routes[pick_route(vrng)].id;
        def.depart_lane = pick_lane(vrng);
        file.vehicles.push_back(def);
      }
      mobility::validate_routes(file, net);
      write(fs::path(out_dir) / ("grid_" + std::to_string(n) + ".rou.xml"), mobility::serialize_routes(file));
    }
    write(fs::path(out_dir) / "scenario.cfg",
          "# 3x3 signalized grid, 400 m blocks\n"
          "net = grid\n"
          "routes = grid_{n}.rou.xml\n"
          "duration_s = 200\n"
          "signals_enabled = true\n"
          "app.start_s = 60\n");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
