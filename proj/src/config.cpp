#include "vanet/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace vanet::config {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad(std::string_view key, std::string_view value, const std::string& why) {
  throw ConfigError(std::string(key) + ": " + why + " (got '" + std::string(value) + "')");
}

double to_double(std::string_view key, std::string_view v) {
  double d = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
  if (ec != std::errc{} || p != v.data() + v.size()) bad(key, v, "expected a number");
  return d;
}

template <class T>
T to_int(std::string_view key, std::string_view v) {
  T x{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size()) bad(key, v, "expected a non-negative integer");
  return x;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(key, v, "expected true or false");
}

std::string to_path(std::string_view v, const std::filesystem::path& base) {
  std::filesystem::path p{std::string(v)};
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal().string();
}

std::vector<std::pair<NodeId, NodeId>> to_flows(std::string_view key, std::string_view v) {
  std::vector<std::pair<NodeId, NodeId>> out;
  std::string s(v);
  for (char& c : s) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(s);
  std::string item;
  while (in >> item) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) bad(key, v, "expected src:dst pairs");
    out.emplace_back(to_int<NodeId>(key, std::string_view(item).substr(0, colon)),
                     to_int<NodeId>(key, std::string_view(item).substr(colon + 1)));
  }
  if (out.empty()) bad(key, v, "expected at least one src:dst pair");
  return out;
}

using Setter = std::function<void(sim::ScenarioConfig&, std::string_view, std::string_view,
                                  const std::filesystem::path&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  using C = sim::ScenarioConfig;
  using P = const std::filesystem::path&;
  using SV = std::string_view;
  static const std::map<std::string, Setter, std::less<>> table = {
      {"net", [](C& c, SV, SV v, P b) { c.net = to_path(v, b); }},
      {"routes", [](C& c, SV, SV v, P b) { c.routes = to_path(v, b); }},
      {"turns", [](C& c, SV, SV v, P b) { c.turns = v.empty() ? "" : to_path(v, b); }},
      {"n_vehicles", [](C& c, SV k, SV v, P) { c.n_vehicles = to_int<std::size_t>(k, v); }},
      {"seed", [](C& c, SV k, SV v, P) { c.seed = to_int<std::uint64_t>(k, v); }},
      {"duration_s", [](C& c, SV k, SV v, P) { c.duration = to_double(k, v); }},
      {"signals_enabled", [](C& c, SV k, SV v, P) { c.signals_enabled = to_bool(k, v); }},
      {"near_signal_radius_m", [](C& c, SV k, SV v, P) { c.near_signal_radius = to_double(k, v); }},
      {"mobility.timestep_s", [](C& c, SV k, SV v, P) { c.mobility.timestep = to_double(k, v); }},
      {"mobility.tau_s", [](C& c, SV k, SV v, P) { c.mobility.tau = to_double(k, v); }},
      {"mobility.min_gap_m", [](C& c, SV k, SV v, P) { c.mobility.min_gap = to_double(k, v); }},
      {"phy.pt_w", [](C& c, SV k, SV v, P) { c.phy.pt = to_double(k, v); }},
      {"phy.freq_hz", [](C& c, SV k, SV v, P) { c.phy.frequency = to_double(k, v); }},
      {"phy.rx_thresh_w",
       [](C& c, SV k, SV v, P) {
         const bool tied = c.phy.cs_thresh == 0.9 * c.phy.rx_thresh;
         c.phy.rx_thresh = to_double(k, v);
         if (tied) c.phy.cs_thresh = 0.9 * c.phy.rx_thresh;
       }},
      {"phy.cs_thresh_w", [](C& c, SV k, SV v, P) { c.phy.cs_thresh = to_double(k, v); }},
      {"phy.ht_m", [](C& c, SV k, SV v, P) { c.phy.ht = to_double(k, v); }},
      {"phy.hr_m", [](C& c, SV k, SV v, P) { c.phy.hr = to_double(k, v); }},
      {"phy.gt", [](C& c, SV k, SV v, P) { c.phy.gt = to_double(k, v); }},
      {"phy.gr", [](C& c, SV k, SV v, P) { c.phy.gr = to_double(k, v); }},
      {"phy.sys_loss", [](C& c, SV k, SV v, P) { c.phy.sys_loss = to_double(k, v); }},
      {"mac.cw_min", [](C& c, SV k, SV v, P) { c.mac.cw_min = to_int<int>(k, v); }},
      {"mac.cw_max", [](C& c, SV k, SV v, P) { c.mac.cw_max = to_int<int>(k, v); }},
      {"mac.retry_limit", [](C& c, SV k, SV v, P) { c.mac.retry_limit = to_int<int>(k, v); }},
      {"mac.slot_us", [](C& c, SV k, SV v, P) { c.mac.slot = SimTime::from_seconds(to_double(k, v) * 1e-6); }},
      {"mac.sifs_us", [](C& c, SV k, SV v, P) { c.mac.sifs = SimTime::from_seconds(to_double(k, v) * 1e-6); }},
      {"mac.difs_us", [](C& c, SV k, SV v, P) { c.mac.difs = SimTime::from_seconds(to_double(k, v) * 1e-6); }},
      {"mac.data_rate_bps", [](C& c, SV k, SV v, P) { c.mac.data_rate = to_double(k, v); }},
      {"mac.basic_rate_bps", [](C& c, SV k, SV v, P) { c.mac.basic_rate = to_double(k, v); }},
      {"mac.ifq_len", [](C& c, SV k, SV v, P) { c.mac.ifq_len = to_int<std::size_t>(k, v); }},
      {"mac.sense_delay_us",
       [](C& c, SV k, SV v, P) { c.sense_delay = SimTime::from_seconds(to_double(k, v) * 1e-6); }},
      {"aodv.active_route_timeout_s", [](C& c, SV k, SV v, P) { c.aodv.active_route_timeout = to_double(k, v); }},
      {"aodv.rreq_retries", [](C& c, SV k, SV v, P) { c.aodv.rreq_retries = to_int<int>(k, v); }},
      {"aodv.ttl_start", [](C& c, SV k, SV v, P) { c.aodv.ttl_start = to_int<int>(k, v); }},
      {"aodv.buffer_per_dest", [](C& c, SV k, SV v, P) { c.aodv.buffer_per_dest = to_int<std::size_t>(k, v); }},
      {"aodv.jitter_s", [](C& c, SV k, SV v, P) { c.aodv.jitter_max = to_double(k, v); }},
      {"app.packet_size_b", [](C& c, SV k, SV v, P) { c.app.packet_size = to_int<std::uint32_t>(k, v); }},
      {"app.rate_bps", [](C& c, SV k, SV v, P) { c.app.rate_bps = to_double(k, v); }},
      {"app.start_s", [](C& c, SV k, SV v, P) { c.app.start_s = to_double(k, v); }},
      {"app.max_pkts", [](C& c, SV k, SV v, P) { c.app.max_packets = to_int<std::uint64_t>(k, v); }},
      {"app.flows", [](C& c, SV k, SV v, P) { c.app.flows = to_flows(k, v); }},
  };
  return table;
}

}  // namespace

void apply(sim::ScenarioConfig& cfg, std::string_view key, std::string_view value,
           const std::filesystem::path& base_dir) {
  const auto& t = setters();
  auto it = t.find(key);
  if (it == t.end()) throw ConfigError(std::string(key) + ": unknown key");
  it->second(cfg, key, value, base_dir);
}

sim::ScenarioConfig parse(std::string_view text, const std::filesystem::path& base_dir, std::string_view source) {
  sim::ScenarioConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = std::string(source) + " line " + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    try {
      apply(cfg, key, value, base_dir);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return cfg;
}

sim::ScenarioConfig load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError(file.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), file.parent_path(), file.string());
}

}  // namespace vanet::config
